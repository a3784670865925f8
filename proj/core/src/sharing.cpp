#include "hetdisc/sharing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "hetdisc/errors.hpp"

namespace hetdisc {

namespace {

void check_weights(std::span<const double> theta, const char* who) {
    if (theta.empty()) throw std::invalid_argument(std::string(who) + ": no agents");
    for (double v : theta) {
        if (!std::isfinite(v) || v < 0.0) {
            throw std::invalid_argument(std::string(who) + ": weights must be finite and nonnegative");
        }
    }
    if (!(std::accumulate(theta.begin(), theta.end(), 0.0) > 0.0)) {
        throw std::invalid_argument(std::string(who) + ": all-zero weights");
    }
}

void check_aggregate(double x, const char* who) {
    if (!std::isfinite(x) || x < 0.0) {
        throw std::invalid_argument(std::string(who) + ": aggregate consumption must be finite and >= 0");
    }
}

void require_not_exponential(const LtcfParams& p, const char* who) {
    if (p.mode == UtilityMode::Exponential) {
        throw std::invalid_argument(std::string(who) + ": requires power or log utility");
    }
}

// sum_i theta_i^(1/g)
double power_sum(std::span<const double> theta, double g) {
    double s = 0.0;
    for (double v : theta) s += g == 1.0 ? v : std::pow(v, 1.0 / g);
    return s;
}

// Geometric mean of strictly positive weights.
double geometric_mean(std::span<const double> theta) {
    double acc = 0.0;
    for (double v : theta) {
        if (!(v > 0.0)) throw std::invalid_argument("exponential utility requires strictly positive weights");
        acc += std::log(v);
    }
    return std::exp(acc / static_cast<double>(theta.size()));
}

void collect_violations(SharingOutcome& out, const LtcfParams& p) {
    const double floor = p.consumption_floor();
    for (std::size_t i = 0; i < out.shares.size(); ++i) {
        if (!(out.shares[i] >= floor)) out.violations.push_back({i, out.shares[i], floor});
    }
}

}  // namespace

void require_interior(const SharingOutcome& outcome) {
    if (outcome.interior()) return;
    const auto& v = outcome.violations.front();
    throw DomainError("sharing: agent " + std::to_string(v.agent + 1) + " share " + std::to_string(v.share) +
                      " is below the consumption floor " + std::to_string(v.floor));
}

SharingOutcome sharing_rule(double x, std::span<const double> theta, const LtcfParams& p) {
    check_weights(theta, "sharing_rule");
    check_aggregate(x, "sharing_rule");
    const auto n = theta.size();
    const double nd = static_cast<double>(n);

    SharingOutcome out;
    out.shares.resize(n);
    out.a_coeffs.resize(n);
    out.b_coeffs.resize(n);

    if (p.mode == UtilityMode::Exponential) {
        // gamma -> inf limit: equal slopes, intercepts from log-weight deviations.
        const double g_mean = geometric_mean(theta);
        for (std::size_t i = 0; i < n; ++i) {
            out.a_coeffs[i] = 1.0 / nd;
            out.b_coeffs[i] = std::log(theta[i] / g_mean) / p.eta;
            out.shares[i] = out.a_coeffs[i] * x + out.b_coeffs[i];
        }
        out.lambda = p.eta * g_mean * std::exp(-p.eta * x / nd);
        collect_violations(out, p);
        return out;
    }

    const double g = p.curvature();
    const WeightVector a = effective_weights(theta, g);
    const double scale = g * p.phi / p.eta;
    for (std::size_t i = 0; i < n; ++i) {
        out.a_coeffs[i] = a[i];
        out.b_coeffs[i] = scale * (a[i] * nd - 1.0);
        out.shares[i] = out.a_coeffs[i] * x + out.b_coeffs[i];
    }
    // Below the group floor every share violates its bound and there is no price.
    const bool priced = x >= p.with_shift_scaled(nd).consumption_floor();
    out.lambda = priced ? aggregate_marginal(x, theta, p) : std::numeric_limits<double>::quiet_NaN();
    collect_violations(out, p);
    return out;
}

SharingOutcome static_oracle(double x, std::span<const double> theta, const LtcfParams& p) {
    check_weights(theta, "static_oracle");
    check_aggregate(x, "static_oracle");
    for (double v : theta) {
        if (!(v > 0.0)) throw std::invalid_argument("static_oracle: weights must be strictly positive");
    }
    const auto n = theta.size();

    auto shares_at = [&](double log_lambda, std::vector<double>& s) {
        const double lambda = std::exp(log_lambda);
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = ltcf_marginal_inverse(lambda / theta[i], p);
            total += s[i];
        }
        return total - x;  // decreasing in lambda
    };

    std::vector<double> s(n);
    const double theta_max = *std::max_element(theta.begin(), theta.end());
    const double per_agent = x / static_cast<double>(n);
    double guess = 1.0;
    if (per_agent > p.consumption_floor()) {
        const double m = ltcf_marginal(per_agent, p);
        if (std::isfinite(m) && m > 0.0) guess = theta_max * m;
    }

    double lo = std::log(guess);
    double hi = lo;
    double step = 1.0;
    double g_lo = shares_at(lo, s);
    double g_hi = g_lo;
    int expansions = 0;
    while (g_lo < 0.0 && expansions < 2000) {
        hi = lo;
        g_hi = g_lo;
        lo -= step;
        step *= 2.0;
        g_lo = shares_at(lo, s);
        ++expansions;
    }
    step = 1.0;
    while (g_hi > 0.0 && expansions < 2000) {
        lo = hi;
        g_lo = g_hi;
        hi += step;
        step *= 2.0;
        g_hi = shares_at(hi, s);
        ++expansions;
    }
    if (!(g_lo >= 0.0 && g_hi <= 0.0) || !std::isfinite(lo) || !std::isfinite(hi)) {
        throw SolverError("static_oracle: no lambda bracket in [" + std::to_string(std::exp(lo)) + ", " +
                          std::to_string(std::exp(hi)) + "]; aggregate consumption below the group floor");
    }

    const double tol = 1e-12 * std::max(1.0, x);
    double mid = 0.5 * (lo + hi);
    for (int it = 0; it < 400; ++it) {
        mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double gap = shares_at(mid, s);
        if (std::abs(gap) <= tol) break;
        if (gap > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    SharingOutcome out;
    out.shares.resize(n);
    shares_at(mid, out.shares);
    out.lambda = std::exp(mid);
    collect_violations(out, p);
    return out;
}

double aggregate_utility(double x, std::span<const double> theta, const LtcfParams& p) {
    check_weights(theta, "aggregate_utility");
    check_aggregate(x, "aggregate_utility");
    const auto n = theta.size();
    const double nd = static_cast<double>(n);
    const double total = std::accumulate(theta.begin(), theta.end(), 0.0);

    if (p.mode == UtilityMode::Exponential) {
        return total - nd * geometric_mean(theta) * std::exp(-p.eta * x / nd);
    }
    const LtcfParams group = p.with_shift_scaled(nd);
    if (x < group.consumption_floor()) throw DomainError("aggregate_utility: consumption below group floor");
    const double base = std::max(0.0, group.phi + p.eta / group.curvature() * x);

    if (p.mode == UtilityMode::Log) {
        double entropy_term = 0.0;
        for (double v : theta) {
            if (v > 0.0) entropy_term += v * std::log(v / total);
        }
        return total * std::log(base) + entropy_term;
    }
    const double g = p.gamma;
    const double scale = std::pow(power_sum(theta, g), g);
    return g / (1.0 - g) * (scale * std::pow(base, 1.0 - g) - total);
}

double aggregate_marginal(double x, std::span<const double> theta, const LtcfParams& p) {
    check_weights(theta, "aggregate_marginal");
    check_aggregate(x, "aggregate_marginal");
    const double nd = static_cast<double>(theta.size());
    if (p.mode == UtilityMode::Exponential) {
        return p.eta * geometric_mean(theta) * std::exp(-p.eta * x / nd);
    }
    const double g = p.curvature();
    const double scale = g == 1.0 ? std::accumulate(theta.begin(), theta.end(), 0.0)
                                  : std::pow(power_sum(theta, g), g);
    return scale * ltcf_marginal(x, p.with_shift_scaled(nd));
}

double reduced_utility_uhat(double x, const LtcfParams& p, std::size_t n) {
    require_not_exponential(p, "reduced_utility_uhat");
    if (n == 0) throw std::invalid_argument("reduced_utility_uhat: n must be positive");
    return ltcf_utility(x, p.with_shift_scaled(static_cast<double>(n)));
}

double reduced_marginal_uhat(double x, const LtcfParams& p, std::size_t n) {
    require_not_exponential(p, "reduced_marginal_uhat");
    if (n == 0) throw std::invalid_argument("reduced_marginal_uhat: n must be positive");
    return ltcf_marginal(x, p.with_shift_scaled(static_cast<double>(n)));
}

double nonstationary_utility(double x, long t, const WeightVector& theta0, const DiscountProfile& d,
                             const LtcfParams& p) {
    require_not_exponential(p, "nonstationary_utility");
    if (t < 0) throw std::invalid_argument("nonstationary_utility: negative period");
    const WeightVector theta_t = weights_at(theta0, d, t);
    return aggregate_utility(x, theta_t.values(), p);
}

TcfAggregate tcf_aggregate(double x, std::span<const double> theta, const LtcfParams& p, std::size_t n) {
    require_not_exponential(p, "tcf_aggregate");
    if (n != theta.size()) throw std::invalid_argument("tcf_aggregate: n does not match the weight vector");
    TcfAggregate out;
    out.alpha_hat = tcf_individual(x, p.with_shift_scaled(static_cast<double>(n)));
    const SharingOutcome shares = sharing_rule(x, theta, p);
    require_interior(shares);
    out.alpha_individual.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.alpha_individual[i] = tcf_individual(shares.shares[i], p);
    return out;
}

}  // namespace hetdisc
