#pragma once

// Instantaneous utility with linear absolute tolerance for consumption
// fluctuations (LTCF) and the Cobb-Douglas technology used by the solvers.
//
//   u(x) = g/(1-g) * [ (phi + (eta/g) x)^(1-g) - 1 ],   0 < g, g != 1
//   u(x) = log(phi + eta x)                              g == 1
//   u(x) = 1 - exp(-eta x)                               g -> inf, phi = 1
//
// Utilities live on the extended reals: -inf is a value, not an error.

#include <limits>

namespace hetdisc {

enum class UtilityMode { Power, Log, Exponential };

struct LtcfParams {
    double gamma = 1.0;
    double eta = 1.0;
    double phi = 0.0;
    UtilityMode mode = UtilityMode::Log;

    // Picks Log when gamma == 1, Power otherwise. Throws std::invalid_argument
    // for gamma <= 0, eta <= 0 or non-finite inputs.
    static LtcfParams make(double gamma, double eta, double phi);

    // Limit gamma -> inf with phi = 1: u(x) = 1 - exp(-eta x).
    static LtcfParams exponential(double eta);

    // Same family with the shift scaled by n, i.e. the reduced utility of an
    // n-agent group (phi -> n * phi).
    [[nodiscard]] LtcfParams with_shift_scaled(double n) const;

    // Smallest admissible consumption: max(0, -phi*gamma/eta).
    [[nodiscard]] double consumption_floor() const;

    // gamma as used in exponents; 1 in log mode.
    [[nodiscard]] double curvature() const { return mode == UtilityMode::Log ? 1.0 : gamma; }
};

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kPosInf = std::numeric_limits<double>::infinity();

// Throws DomainError when x < consumption_floor().
double ltcf_utility(double x, const LtcfParams& p);

// u'(x) = eta (phi + (eta/g) x)^(-g); +inf where the base vanishes.
double ltcf_marginal(double x, const LtcfParams& p);

// u''(x) = -eta^2/g (phi + (eta/g) x)^(-g-1).
double ltcf_second_derivative(double x, const LtcfParams& p);

// Inverse of u' on (0, inf): the consumption whose marginal utility is m. May
// fall below the admissible floor (e.g. phi > 0 and m > u'(0)); callers check.
double ltcf_marginal_inverse(double m, const LtcfParams& p);

// Inverse of u on its range. Throws DomainError outside the range.
double ltcf_utility_inverse(double v, const LtcfParams& p);

// Individual TCF index -u'/u'' = (1/eta)(phi + (eta/g) x).
double tcf_individual(double x, const LtcfParams& p);

struct Technology {
    double A = 1.0;   // productivity
    double a = 0.36;  // output elasticity, in (0, 1)

    static Technology make(double A, double a);

    // Fixed point of f: A^(1/(1-a)).
    [[nodiscard]] double k_max() const;
    [[nodiscard]] double output(double k) const;
    [[nodiscard]] double marginal_product(double k) const;
};

struct TechnologyValue {
    double output;
    double marginal_product;
    double k_max;
};

// f(k) = A k^a, f'(k) = a A k^(a-1). Throws DomainError for k < 0.
TechnologyValue technology_eval(double k, const Technology& tech);

}  // namespace hetdisc
