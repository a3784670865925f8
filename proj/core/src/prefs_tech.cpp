#include "hetdisc/prefs_tech.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "hetdisc/errors.hpp"

namespace hetdisc {

namespace {

void require_finite(double v, const char* name) {
    if (!std::isfinite(v)) {
        throw std::invalid_argument(std::string(name) + " must be finite");
    }
}

// phi + (eta/g) x, clamped at zero when x sits on the floor up to roundoff.
double base_of(double x, const LtcfParams& p) {
    if (std::isnan(x) || x < p.consumption_floor()) {
        throw DomainError("consumption " + std::to_string(x) + " below admissible floor " +
                          std::to_string(p.consumption_floor()));
    }
    const double b = p.phi + (p.eta / p.curvature()) * x;
    return b < 0.0 ? 0.0 : b;
}

}  // namespace

LtcfParams LtcfParams::make(double gamma, double eta, double phi) {
    require_finite(gamma, "gamma");
    require_finite(eta, "eta");
    require_finite(phi, "phi");
    if (gamma <= 0.0) throw std::invalid_argument("gamma must be positive");
    if (eta <= 0.0) throw std::invalid_argument("eta must be positive");
    return LtcfParams{gamma, eta, phi, gamma == 1.0 ? UtilityMode::Log : UtilityMode::Power};
}

LtcfParams LtcfParams::exponential(double eta) {
    require_finite(eta, "eta");
    if (eta <= 0.0) throw std::invalid_argument("eta must be positive");
    return LtcfParams{kPosInf, eta, 1.0, UtilityMode::Exponential};
}

LtcfParams LtcfParams::with_shift_scaled(double n) const {
    LtcfParams q = *this;
    if (mode != UtilityMode::Exponential) q.phi = phi * n;
    return q;
}

double LtcfParams::consumption_floor() const {
    if (mode == UtilityMode::Exponential || phi >= 0.0) return 0.0;
    return -phi * curvature() / eta;
}

double ltcf_utility(double x, const LtcfParams& p) {
    if (p.mode == UtilityMode::Exponential) {
        base_of(x, p);
        return -std::expm1(-p.eta * x);
    }
    const double b = base_of(x, p);
    if (p.mode == UtilityMode::Log) return std::log(b);
    const double g = p.gamma;
    // expm1 keeps precision when the base is near one; log(0) = -inf yields
    // either -1 (g < 1) or +inf (g > 1) inside, giving the finite floor or -inf.
    return g / (1.0 - g) * std::expm1((1.0 - g) * std::log(b));
}

double ltcf_marginal(double x, const LtcfParams& p) {
    if (p.mode == UtilityMode::Exponential) {
        base_of(x, p);
        return p.eta * std::exp(-p.eta * x);
    }
    const double b = base_of(x, p);
    if (b == 0.0) return kPosInf;
    if (p.mode == UtilityMode::Log) return p.eta / b;
    return p.eta * std::exp(-p.gamma * std::log(b));
}

double ltcf_second_derivative(double x, const LtcfParams& p) {
    if (p.mode == UtilityMode::Exponential) {
        base_of(x, p);
        return -p.eta * p.eta * std::exp(-p.eta * x);
    }
    const double b = base_of(x, p);
    if (b == 0.0) return kNegInf;
    if (p.mode == UtilityMode::Log) return -p.eta * p.eta / (b * b);
    return -p.eta * p.eta * std::exp((-p.gamma - 1.0) * std::log(b));
}

double ltcf_marginal_inverse(double m, const LtcfParams& p) {
    if (!(m > 0.0)) throw DomainError("marginal utility must be positive");
    switch (p.mode) {
        case UtilityMode::Exponential:
            return -std::log(m / p.eta) / p.eta;
        case UtilityMode::Log:
            return (p.eta / m - p.phi) / p.eta;
        case UtilityMode::Power:
            break;
    }
    const double b = std::exp(-std::log(m / p.eta) / p.gamma);
    return p.gamma / p.eta * (b - p.phi);
}

double ltcf_utility_inverse(double v, const LtcfParams& p) {
    double x = 0.0;
    switch (p.mode) {
        case UtilityMode::Exponential:
            if (!(v < 1.0) || v < 0.0) throw DomainError("utility value outside range [0, 1)");
            x = -std::log1p(-v) / p.eta;
            break;
        case UtilityMode::Log:
            if (!std::isfinite(v)) throw DomainError("utility value must be finite");
            x = (std::exp(v) - p.phi) / p.eta;
            break;
        case UtilityMode::Power: {
            const double g = p.gamma;
            const double arg = v * (1.0 - g) / g;  // b^(1-g) - 1
            if (!std::isfinite(v) || !(arg > -1.0)) {
                throw DomainError("utility value outside the range of u");
            }
            const double b = std::exp(std::log1p(arg) / (1.0 - g));
            x = g / p.eta * (b - p.phi);
            break;
        }
    }
    if (!std::isfinite(x) || x < p.consumption_floor()) {
        throw DomainError("utility value outside the range of u on the admissible domain");
    }
    return x;
}

double tcf_individual(double x, const LtcfParams& p) {
    if (p.mode == UtilityMode::Exponential) {
        base_of(x, p);
        return 1.0 / p.eta;
    }
    return base_of(x, p) / p.eta;
}

Technology Technology::make(double A, double a) {
    require_finite(A, "A");
    require_finite(a, "a");
    if (A <= 0.0) throw std::invalid_argument("technology: A must be positive");
    if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("technology: a must lie in (0, 1)");
    return Technology{A, a};
}

double Technology::k_max() const { return std::pow(A, 1.0 / (1.0 - a)); }

double Technology::output(double k) const {
    if (std::isnan(k) || k < 0.0) throw DomainError("capital must be nonnegative");
    return A * std::pow(k, a);
}

double Technology::marginal_product(double k) const {
    if (std::isnan(k) || k < 0.0) throw DomainError("capital must be nonnegative");
    if (k == 0.0) return kPosInf;
    return a * A * std::pow(k, a - 1.0);
}

TechnologyValue technology_eval(double k, const Technology& tech) {
    return {tech.output(k), tech.marginal_product(k), tech.k_max()};
}

}  // namespace hetdisc
