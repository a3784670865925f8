#pragma once

// Finite-horizon backward induction for the collective growth problem with
// time-varying Pareto weights, path simulation, Euler residuals and re-planning.
//
// The default (effective) formulation runs the weight-free reduced utility
// U_hat with per-period continuation factor mu_hat(theta_t); the raw
// formulation runs U(., theta_t) with mu(theta_t). Both truncate at period T
// with either the stationary most-patient continuation or a zero tail.

#include <cstddef>
#include <optional>
#include <vector>

#include "hetdisc/bellman.hpp"
#include "hetdisc/prefs_tech.hpp"
#include "hetdisc/weights.hpp"

namespace hetdisc {

// Relative accuracy the grid solver is held to (policy and path agreement).
inline constexpr double kInterpolationTolerance = 1e-3;

enum class TailMode {
    DictatorContinuation,  // V_T = stationary value with U_hat and discount d^1
    Zero,                  // V_T(k) = flow(f(k) - k_min); nothing saved beyond T
};

enum class Formulation {
    Effective,  // (U_hat, mu_hat(theta_t))
    Raw,        // (U(., theta_t), mu(theta_t))
};

struct SolverConfig {
    LtcfParams prefs;
    Technology tech;
    DiscountProfile discounts;
    WeightVector theta0;
    std::size_t grid_size = 512;
    double k_min = 1e-3;
    long horizon = 200;
    TailMode tail = TailMode::DictatorContinuation;
    double tolerance = 1e-10;  // stationary tail solve
    Interpolation interpolation = Interpolation::MonotoneCubic;
    Formulation formulation = Formulation::Effective;
    int threads = 0;  // 0 = OpenMP default

    // Throws std::invalid_argument describing the first violated requirement.
    // Horizons below 10 are accepted only with allow_short_horizon (re-plans).
    void validate(bool allow_short_horizon = false) const;
    [[nodiscard]] std::size_t agents() const { return theta0.size(); }
};

struct PolicyTable {
    Formulation formulation = Formulation::Effective;
    TailMode tail = TailMode::DictatorContinuation;
    std::vector<double> grid;
    // Indexed [t][node], t = 0..T. Row T is the tail policy.
    std::vector<std::vector<double>> next_capital;
    std::vector<std::vector<double>> consumption;
    std::vector<std::vector<double>> value;  // current-period units
    std::vector<ValueFunction> value_fn;
    std::vector<double> discount;  // continuation factor from t to t+1, t = 0..T-1
    std::vector<double> scale;     // converts period-t values to period-0 units
    std::optional<StationaryResult> tail_solution;

    [[nodiscard]] long horizon() const { return static_cast<long>(next_capital.size()) - 1; }
    [[nodiscard]] double value_period0(long t, std::size_t node) const {
        return scale[static_cast<std::size_t>(t)] * value[static_cast<std::size_t>(t)][node];
    }
};

PolicyTable solve_nsf(const SolverConfig& config);

struct TrajectoryRecord {
    std::vector<double> k;  // k_0..k_T
    std::vector<double> x;  // x_0..x_T
    double k_terminal = 0.0;  // k_{T+1}
    std::vector<WeightVector> theta;
    std::vector<std::vector<double>> shares;
    std::vector<bool> shares_interior;
    std::vector<double> beta;
    std::vector<double> beta_hat;
    std::vector<double> mu;
    std::vector<double> mu_hat;
    std::vector<double> euler;  // NaN where not defined
    std::vector<bool> euler_valid;

    [[nodiscard]] long horizon() const { return static_cast<long>(k.size()) - 1; }
};

// Forward simulation from k0 in [k_min, k_max]. Each savings choice is
// re-optimized at the off-grid state against the stored continuation value.
// Throws SolverError when k0 lies outside the grid.
TrajectoryRecord simulate_path(double k0, const PolicyTable& table, const SolverConfig& config);

struct EulerResiduals {
    std::vector<double> values;  // NaN where invalid
    std::vector<bool> valid;
};

// R_t = 1 - beta_hat_{t+1} U_hat'(x_{t+1}) f'(k_{t+1}) / (beta_hat_t U_hat'(x_t)).
// Invalid at t = T and wherever k_{t+1} sits on the lower grid bound.
EulerResiduals euler_residual(const TrajectoryRecord& traj, const SolverConfig& config);

// Largest |R_t| over valid periods in [from, to].
double max_abs_residual(const EulerResiduals& r, long from, long to);

struct ReplanReport {
    long t_prime = 0;
    double max_abs = 0.0;  // max |k_replan - k_original| over t >= t'
    double max_rel = 0.0;  // same, relative to k_original
    long first_disagreement = -1;  // first period with relative gap above 1e-6, -1 if none
    TrajectoryRecord replanned;
};

// Re-solves from period t' with state k_{t'} over the remaining horizon,
// restarting from `restart_weights` (default: the weights reached at t').
ReplanReport replan_from(const TrajectoryRecord& traj, long t_prime, const SolverConfig& config,
                         const std::optional<WeightVector>& restart_weights = std::nullopt);

// Time-varying weights: the re-plan starts from theta_{t'}. Requires 0 < t' < T/2.
ReplanReport replan_check(const TrajectoryRecord& traj, long t_prime, const SolverConfig& config);

// Largest relative gap between two policy tables over all periods and nodes.
double max_policy_gap(const PolicyTable& a, const PolicyTable& b);

}  // namespace hetdisc
