#pragma once

// Stationarity, time invariance and time consistency of collective time
// preferences over temporal payments, plus the rates of time preference they
// imply. All quantities use the effective discount factors beta_hat_t.

#include <span>
#include <vector>

#include "hetdisc/prefs_tech.hpp"
#include "hetdisc/weights.hpp"

namespace hetdisc {

struct TemporalPayment {
    double amount;
    long date;
};

struct AxiomWitness {
    double b = 0.0;
    double c = 0.0;  // solves the period-t indifference between (b, t+tau) and (c, t+tau')
    long t = 0;
    long t_prime = 0;
    long tau = 0;
    long tau_prime = 0;
};

struct AxiomVerdict {
    bool stationarity = true;
    bool time_invariance = true;
    bool time_consistency = true;
    // Relative gap fell between the equality (1e-12) and strict (1e-10) thresholds.
    bool ambiguous = false;
    double relative_gap = 0.0;
    AxiomWitness witness;
};

// beta_hat_s = (sum_i theta_hat_0^i (d_hat^i)^s)^gamma for any s >= 0.
double effective_beta(const WeightVector& theta0, const DiscountProfile& d, long s);

// beta_hat_{t+tau}/beta_hat_{t+tau'} - beta_hat_{t'+tau}/beta_hat_{t'+tau'}, computed
// from a pairwise expansion whose terms are all nonnegative, so the sign and the
// exact zero when (t'-t)(tau'-tau) = 0 survive rounding.
// Requires 0 <= t <= t' and 0 <= tau <= tau'.
double impatience_gap(const WeightVector& theta0, const DiscountProfile& d, long t, long t_prime, long tau,
                      long tau_prime);

// Builds c from b by inverting U_hat so that the period-t indifference holds
// exactly, then decides the three properties. Throws DomainError when the
// implied c falls outside the range of U_hat.
AxiomVerdict check_axioms(double b, long t, long t_prime, long tau, long tau_prime, const WeightVector& theta0,
                          const DiscountProfile& d, const LtcfParams& p);

// Marginal rate of substitution between x_t and x_{t+1}, with the
// beta_{t+1}/beta_t ratio taken as mu(theta_t).
double mrs(double x_t, double x_next, std::span<const double> theta_t, std::span<const double> theta_next,
           const LtcfParams& p, const DiscountProfile& d);

// 1/mu_hat(theta) - 1.
double pure_rate(std::span<const double> theta, const DiscountProfile& d);

struct ImpatienceProfile {
    std::vector<double> rate;    // rho_hat_t, t = 0..T
    // rho_hat_t - (1/d^1 - 1), formed without cancellation so that its decline
    // stays visible after rho_hat_t itself has rounded to its limit.
    std::vector<double> excess;
};

ImpatienceProfile marginal_impatience_profile(const WeightVector& theta0, const DiscountProfile& d, long T);

}  // namespace hetdisc
