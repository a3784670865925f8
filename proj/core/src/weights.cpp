#include "hetdisc/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace hetdisc {

namespace {

constexpr double kSimplexTol = 1e-12;
constexpr double kClampBelow = 1e-300;

}  // namespace

WeightVector WeightVector::from_logs(const std::vector<double>& logw) {
    const double top = *std::max_element(logw.begin(), logw.end());
    if (top == -std::numeric_limits<double>::infinity()) {
        throw std::invalid_argument("weights: all-zero weight vector");
    }
    std::vector<double> w(logw.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        w[i] = std::exp(logw[i] - top);
        sum += w[i];
    }
    bool clamped = false;
    for (std::size_t i = 0; i < w.size(); ++i) {
        const bool positive = logw[i] != -std::numeric_limits<double>::infinity();
        w[i] /= sum;
        if (positive && w[i] < kClampBelow) {
            w[i] = 0.0;
            clamped = true;
        }
    }
    if (clamped) {
        const double s = std::accumulate(w.begin(), w.end(), 0.0);
        for (double& v : w) v /= s;
    }
    return WeightVector(std::move(w), clamped);
}

WeightVector WeightVector::from(std::vector<double> theta) {
    if (theta.empty()) throw std::invalid_argument("weights: empty weight vector");
    double sum = 0.0;
    for (double v : theta) {
        if (!std::isfinite(v) || v < 0.0) {
            throw std::invalid_argument("weights: entries must be finite and nonnegative");
        }
        sum += v;
    }
    if (std::abs(sum - 1.0) > kSimplexTol) {
        throw std::invalid_argument("weights: entries must sum to one");
    }
    return WeightVector(std::move(theta), false);
}

WeightVector WeightVector::normalized(std::vector<double> theta) {
    if (theta.empty()) throw std::invalid_argument("weights: empty weight vector");
    double sum = 0.0;
    for (double v : theta) {
        if (!std::isfinite(v) || v < 0.0) {
            throw std::invalid_argument("weights: entries must be finite and nonnegative");
        }
        sum += v;
    }
    if (!(sum > 0.0)) throw std::invalid_argument("weights: all-zero weight vector");
    bool clamped = false;
    for (double& v : theta) {
        v /= sum;
        if (v != 0.0 && v < kClampBelow) {
            v = 0.0;
            clamped = true;
        }
    }
    if (clamped) {
        const double s = std::accumulate(theta.begin(), theta.end(), 0.0);
        for (double& v : theta) v /= s;
    }
    return WeightVector(std::move(theta), clamped);
}

DiscountProfile DiscountProfile::make(std::vector<double> delta, double gamma) {
    if (delta.empty()) throw std::invalid_argument("discount profile: no agents");
    if (!std::isfinite(gamma) || gamma <= 0.0) {
        throw std::invalid_argument("discount profile: gamma must be positive and finite");
    }
    for (std::size_t i = 0; i < delta.size(); ++i) {
        if (!(delta[i] > 0.0 && delta[i] < 1.0)) {
            throw std::invalid_argument("discount profile: factors must lie in (0, 1)");
        }
        if (i > 0 && delta[i] > delta[i - 1]) {
            throw std::invalid_argument("discount profile: factors must be ordered from most to least patient");
        }
    }
    std::vector<double> hat(delta.size());
    for (std::size_t i = 0; i < delta.size(); ++i) hat[i] = std::pow(delta[i], 1.0 / gamma);
    return DiscountProfile(std::move(delta), std::move(hat), gamma);
}

WeightVector update_weights(std::span<const double> theta, const DiscountProfile& d) {
    if (theta.size() != d.size()) throw std::invalid_argument("update_weights: size mismatch");
    std::vector<double> next(theta.size());
    for (std::size_t i = 0; i < theta.size(); ++i) next[i] = theta[i] * d.delta()[i];
    return WeightVector::normalized(std::move(next));
}

WeightVector weights_at(const WeightVector& theta0, const DiscountProfile& d, long t) {
    if (theta0.size() != d.size()) throw std::invalid_argument("weights_at: size mismatch");
    if (t < 0) throw std::invalid_argument("weights_at: negative period");
    if (t == 0) return theta0;
    std::vector<double> logw(theta0.size());
    for (std::size_t i = 0; i < logw.size(); ++i) {
        logw[i] = std::log(theta0[i]) + static_cast<double>(t) * std::log(d.delta()[i]);
    }
    return WeightVector::from_logs(logw);
}

double mu(std::span<const double> theta, const DiscountProfile& d) {
    if (theta.size() != d.size()) throw std::invalid_argument("mu: size mismatch");
    // d^1 - sum theta^i (d^1 - d^i) on the simplex: the shortfall keeps shrinking
    // after theta^1 has rounded to one, where the plain weighted sum wobbles.
    const double top = d.delta()[0];
    double gap = 0.0;
    for (std::size_t i = 1; i < theta.size(); ++i) gap += theta[i] * (top - d.delta()[i]);
    return top - gap;
}

WeightVector effective_weights(std::span<const double> theta, double gamma) {
    if (!(gamma > 0.0)) throw std::invalid_argument("effective_weights: gamma must be positive");
    if (gamma == 1.0) return WeightVector::normalized({theta.begin(), theta.end()});
    std::vector<double> logw(theta.size());
    for (std::size_t i = 0; i < theta.size(); ++i) {
        if (!(theta[i] >= 0.0)) throw std::invalid_argument("effective_weights: negative weight");
        logw[i] = std::log(theta[i]) / gamma;
    }
    return WeightVector::from_logs(logw);
}

double effective_mu(std::span<const double> theta, const DiscountProfile& d) {
    if (theta.size() != d.size()) throw std::invalid_argument("effective_mu: size mismatch");
    const WeightVector a = effective_weights(theta, d.gamma());
    const double top = d.delta_hat()[0];
    double gap = 0.0;
    for (std::size_t i = 1; i < a.size(); ++i) gap += a[i] * (top - d.delta_hat()[i]);
    const double m = top - gap;
    return d.gamma() == 1.0 ? m : std::pow(m, d.gamma());
}

double effective_mu_shortfall(std::span<const double> theta, const DiscountProfile& d) {
    if (theta.size() != d.size()) throw std::invalid_argument("effective_mu: size mismatch");
    const WeightVector a = effective_weights(theta, d.gamma());
    const double top = d.delta_hat()[0];
    // top - sum_i a^i dhat^i = sum_i a^i (top - dhat^i), every term >= 0
    double gap = 0.0;
    for (std::size_t i = 1; i < a.size(); ++i) gap += a[i] * (top - d.delta_hat()[i]);
    return -d.most_patient() * std::expm1(d.gamma() * std::log1p(-gap / top));
}

DiscountSequence discount_sequences(const WeightVector& theta0, const DiscountProfile& d, long T) {
    if (T < 1) throw std::invalid_argument("discount_sequences: horizon must be >= 1");
    if (theta0.size() != d.size()) throw std::invalid_argument("discount_sequences: size mismatch");
    const WeightVector eff0 = effective_weights(theta0.values(), d.gamma());
    const auto n = theta0.size();
    const auto len = static_cast<std::size_t>(T) + 1;

    DiscountSequence seq;
    seq.beta.resize(len);
    seq.beta_hat.resize(len);
    seq.mu.resize(len);
    seq.mu_hat.resize(len);

    std::vector<double> pow_d(n, 1.0);
    std::vector<double> pow_dhat(n, 1.0);
    for (std::size_t t = 0; t < len; ++t) {
        double b = 0.0;
        double bh = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            b += theta0[i] * pow_d[i];
            bh += eff0[i] * pow_dhat[i];
        }
        seq.beta[t] = t == 0 ? 1.0 : b;
        seq.beta_hat[t] = t == 0 ? 1.0 : (d.gamma() == 1.0 ? bh : std::pow(bh, d.gamma()));
        const WeightVector theta_t = weights_at(theta0, d, static_cast<long>(t));
        seq.mu[t] = mu(theta_t.values(), d);
        seq.mu_hat[t] = effective_mu(theta_t.values(), d);
        for (std::size_t i = 0; i < n; ++i) {
            pow_d[i] = std::pow(d.delta()[i], static_cast<double>(t + 1));
            pow_dhat[i] = std::pow(d.delta_hat()[i], static_cast<double>(t + 1));
        }
    }
    return seq;
}

}  // namespace hetdisc
