#include "hetdisc/axioms.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "hetdisc/errors.hpp"
#include "hetdisc/sharing.hpp"

namespace hetdisc {

namespace {

constexpr double kEqualTol = 1e-12;
constexpr double kStrictTol = 1e-10;

// B_s = sum_i w^i (d_hat^i)^s, so that beta_hat_s = B_s^gamma.
double effective_base(const WeightVector& w, const DiscountProfile& d, long s) {
    double b = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        b += w[i] * std::exp(static_cast<double>(s) * std::log(d.delta_hat()[i]));
    }
    return b;
}

// a^m - b^m for 0 < b <= a < 1, accurate when b is close to a.
double power_difference(double a, double b, long m) {
    const double am = std::exp(static_cast<double>(m) * std::log(a));
    return -am * std::expm1(static_cast<double>(m) * std::log(b / a));
}

void check_order(long t, long t_prime, long tau, long tau_prime) {
    if (t < 0 || tau < 0 || t_prime < t || tau_prime < tau) {
        throw std::invalid_argument("impatience_gap: need 0 <= t <= t' and 0 <= tau <= tau'");
    }
}

}  // namespace

double effective_beta(const WeightVector& theta0, const DiscountProfile& d, long s) {
    if (s < 0) throw std::invalid_argument("effective_beta: negative period");
    if (theta0.size() != d.size()) throw std::invalid_argument("effective_beta: size mismatch");
    if (s == 0) return 1.0;
    const WeightVector w = effective_weights(theta0.values(), d.gamma());
    const double base = effective_base(w, d, s);
    return d.gamma() == 1.0 ? base : std::pow(base, d.gamma());
}

double impatience_gap(const WeightVector& theta0, const DiscountProfile& d, long t, long t_prime, long tau,
                      long tau_prime) {
    check_order(t, t_prime, tau, tau_prime);
    if (theta0.size() != d.size()) throw std::invalid_argument("impatience_gap: size mismatch");
    const WeightVector w = effective_weights(theta0.values(), d.gamma());
    const long dt = t_prime - t;
    const long dtau = tau_prime - tau;

    // Factors relative to the most patient one keep every base above w^1 > 0;
    // the gap picks up d^1^(-dtau) on the way back.
    std::vector<double> q(w.size());
    for (std::size_t i = 0; i < q.size(); ++i) q[i] = d.delta_hat()[i] / d.delta_hat()[0];
    auto base = [&](long s) {
        double b = 0.0;
        for (std::size_t i = 0; i < q.size(); ++i) b += w[i] * std::exp(static_cast<double>(s) * std::log(q[i]));
        return b;
    };

    // P - Q with P = B_{t+tau} B_{t'+tau'}, Q = B_{t'+tau} B_{t+tau'}.
    double diff = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        for (std::size_t j = i + 1; j < q.size(); ++j) {
            const double common = std::exp(static_cast<double>(t + tau) * std::log(q[i] * q[j]));
            diff += w[i] * w[j] * common * power_difference(q[i], q[j], dt) * power_difference(q[i], q[j], dtau);
        }
    }
    if (diff == 0.0) return 0.0;

    const double g = d.gamma();
    const double p = base(t + tau) * base(t_prime + tau_prime);
    const double den = base(t + tau_prime) * base(t_prime + tau_prime);
    // (P^g - Q^g) / den^g with Q = P - diff
    const double num = -std::pow(p, g) * std::expm1(g * std::log1p(-diff / p));
    return num / std::pow(den, g) * std::pow(d.most_patient(), -static_cast<double>(dtau));
}

AxiomVerdict check_axioms(double b, long t, long t_prime, long tau, long tau_prime, const WeightVector& theta0,
                          const DiscountProfile& d, const LtcfParams& p) {
    check_order(t, t_prime, tau, tau_prime);
    const std::size_t n = theta0.size();
    const LtcfParams group = p.with_shift_scaled(static_cast<double>(n));

    AxiomVerdict v;
    v.witness = {b, b, t, t_prime, tau, tau_prime};
    const double ub = reduced_utility_uhat(b, p, n);
    const double ratio = effective_beta(theta0, d, t + tau) / effective_beta(theta0, d, t + tau_prime);
    v.witness.c = ltcf_utility_inverse(ratio * ub, group);
    if (ub == 0.0) return v;  // b = c at every date

    v.relative_gap = impatience_gap(theta0, d, t, t_prime, tau, tau_prime) / ratio;
    if (v.relative_gap > kStrictTol) {
        v.stationarity = false;
        v.time_invariance = false;
    } else if (v.relative_gap > kEqualTol) {
        v.ambiguous = true;
    }

    // The indifference between dated payments (t'+tau) and (t'+tau') seen from
    // t and from t': both reduce to the same beta_hat ratio.
    const double bt = effective_beta(theta0, d, t);
    const double btp = effective_beta(theta0, d, t_prime);
    const double early = effective_beta(theta0, d, t_prime + tau);
    const double late = effective_beta(theta0, d, t_prime + tau_prime);
    const double from_t = (early / bt) / (late / bt);
    const double from_tp = (early / btp) / (late / btp);
    v.time_consistency = std::abs(from_t - from_tp) <= kEqualTol * from_tp;
    return v;
}

double mrs(double x_t, double x_next, std::span<const double> theta_t, std::span<const double> theta_next,
           const LtcfParams& p, const DiscountProfile& d) {
    const double num = aggregate_marginal(x_t, theta_t, p);
    const double den = mu(theta_t, d) * aggregate_marginal(x_next, theta_next, p);
    return num / den;
}

double pure_rate(std::span<const double> theta, const DiscountProfile& d) { return 1.0 / effective_mu(theta, d) - 1.0; }

ImpatienceProfile marginal_impatience_profile(const WeightVector& theta0, const DiscountProfile& d, long T) {
    if (T < 2) throw std::invalid_argument("marginal_impatience_profile: T must be at least 2");
    ImpatienceProfile prof;
    prof.rate.reserve(static_cast<std::size_t>(T) + 1);
    prof.excess.reserve(static_cast<std::size_t>(T) + 1);
    const double top = d.most_patient();
    const double limit = 1.0 / top - 1.0;
    for (long t = 0; t <= T; ++t) {
        const WeightVector th = weights_at(theta0, d, t);
        const double m = effective_mu(th.values(), d);
        // 1/m - 1/top = (top - m) / (m top); the rate is rebuilt from it so both decline together
        const double excess = effective_mu_shortfall(th.values(), d) / (m * top);
        prof.excess.push_back(excess);
        prof.rate.push_back(limit + excess);
    }
    return prof;
}

}  // namespace hetdisc
