#pragma once

// Static Pareto allocation of aggregate consumption among agents with a common
// LTCF utility. Weight arguments are raw spans: the closed forms are written
// for unnormalized weights so that homogeneity properties can be probed.

#include <cstddef>
#include <span>
#include <vector>

#include "hetdisc/prefs_tech.hpp"
#include "hetdisc/weights.hpp"

namespace hetdisc {

struct InteriorityViolation {
    std::size_t agent;  // zero-based
    double share;
    double floor;
};

struct SharingOutcome {
    std::vector<double> shares;
    double lambda = 0.0;            // shadow price of the resource constraint, NaN below the group floor
    std::vector<double> a_coeffs;   // slope of each agent's rule in x
    std::vector<double> b_coeffs;   // intercept of each agent's rule
    std::vector<InteriorityViolation> violations;

    [[nodiscard]] bool interior() const { return violations.empty(); }
};

// Throws DomainError naming the first offending agent if the outcome is not interior.
void require_interior(const SharingOutcome& outcome);

// Linear rule s^i = a^i x + b^i with a^i = theta_i^(1/g) / sum_j theta_j^(1/g)
// and b^i = (g phi/eta)(a^i n - 1). Shares below the consumption floor are
// reported in `violations`, never clamped.
SharingOutcome sharing_rule(double x, std::span<const double> theta, const LtcfParams& p);

// Independent solution of the static program: bisection on log(lambda) with
// each share from the inverse of theta_i u'(.) = lambda, until the resource
// gap is below 1e-12 (relative to max(1, x)). Throws SolverError when no
// bracket exists (x below the aggregate floor).
SharingOutcome static_oracle(double x, std::span<const double> theta, const LtcfParams& p);

// U(x, theta) = g/(1-g) [ (sum theta_i^(1/g))^g (phi n + (eta/g) x)^(1-g) - sum theta_i ].
// On the simplex the last term is 1. Log mode uses the matching limit.
double aggregate_utility(double x, std::span<const double> theta, const LtcfParams& p);

// dU/dx, equal to the shadow price lambda.
double aggregate_marginal(double x, std::span<const double> theta, const LtcfParams& p);

// Group utility freed of weights: the LTCF member with shift phi n.
double reduced_utility_uhat(double x, const LtcfParams& p, std::size_t n);
double reduced_marginal_uhat(double x, const LtcfParams& p, std::size_t n);

// U_t(x): aggregate utility at the weights reached after t periods.
double nonstationary_utility(double x, long t, const WeightVector& theta0, const DiscountProfile& d,
                             const LtcfParams& p);

struct TcfAggregate {
    double alpha_hat = 0.0;                 // (1/eta)(phi n + (eta/g) x), independent of weights
    std::vector<double> alpha_individual;   // -u'/u'' at each agent's share
};

TcfAggregate tcf_aggregate(double x, std::span<const double> theta, const LtcfParams& p, std::size_t n);

}  // namespace hetdisc
