#pragma once

// Shared fixtures for the test binaries: seeded samplers and config builders.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "hetdisc/sharing.hpp"
#include "hetdisc/solver.hpp"
#include "hetdisc/weights.hpp"

namespace hetdisc::testing {

class Sampler {
public:
    explicit Sampler(std::uint64_t seed) : rng_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    long integer(long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng_); }

    // Point of the simplex with every entry at least `floor` before normalization.
    std::vector<double> simplex(std::size_t n, double floor = 0.0) {
        std::vector<double> w(n);
        for (double& v : w) v = floor + uniform(0.0, 1.0);
        double s = 0.0;
        for (double v : w) s += v;
        for (double& v : w) v /= s;
        return w;
    }

    // Strictly decreasing factors in [lo, hi] with consecutive gaps of at least min_gap.
    std::vector<double> discounts(std::size_t n, double lo, double hi, double min_gap) {
        for (;;) {
            std::vector<double> d(n);
            for (double& v : d) v = uniform(lo, hi);
            std::sort(d.begin(), d.end(), std::greater<>());
            bool ok = true;
            for (std::size_t i = 1; i < n; ++i) ok = ok && d[i - 1] - d[i] >= min_gap;
            if (ok) return d;
        }
    }

    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
};

// Smallest aggregate at which every share a^i x + b^i clears the individual floor.
// The coefficients do not depend on x, so any admissible x exposes them.
inline double interior_threshold(const std::vector<double>& theta, const LtcfParams& p) {
    const double group_floor = p.with_shift_scaled(static_cast<double>(theta.size())).consumption_floor();
    const auto out = sharing_rule(group_floor, theta, p);
    double x = group_floor;
    for (std::size_t i = 0; i < theta.size(); ++i) {
        x = std::max(x, (p.consumption_floor() - out.b_coeffs[i]) / out.a_coeffs[i]);
    }
    return x;
}

inline WeightVector simplex_weights(std::vector<double> w) { return WeightVector::normalized(std::move(w)); }

inline SolverConfig make_config(std::vector<double> delta, std::vector<double> theta0, double gamma,
                                std::size_t grid = 512, long T = 200, double phi = 0.0) {
    return SolverConfig{
        .prefs = LtcfParams::make(gamma, 1.0, phi),
        .tech = Technology::make(1.0, 0.36),
        .discounts = DiscountProfile::make(std::move(delta), gamma),
        .theta0 = WeightVector::normalized(std::move(theta0)),
        .grid_size = grid,
        .horizon = T,
    };
}

// beta_t = sum_i theta_0^i (d^i)^t by direct powers.
inline double direct_beta(const std::vector<double>& theta0, const std::vector<double>& delta, long t) {
    double b = 0.0;
    for (std::size_t i = 0; i < delta.size(); ++i) b += theta0[i] * std::pow(delta[i], static_cast<double>(t));
    return b;
}

// Infinite-horizon log/Cobb-Douglas savings rate with time-varying weights:
// d_t = sum_i theta_0^i a (d^i)^t / (1 - a d^i), sigma_t = d_{t+1} / (beta_t + d_{t+1}).
inline double log_savings_rate(const std::vector<double>& theta0, const std::vector<double>& delta, double a,
                               long t) {
    double d_next = 0.0;
    for (std::size_t i = 0; i < delta.size(); ++i) {
        d_next += theta0[i] * a * std::pow(delta[i], static_cast<double>(t + 1)) / (1.0 - a * delta[i]);
    }
    return d_next / (direct_beta(theta0, delta, t) + d_next);
}

}  // namespace hetdisc::testing
