#pragma once

// Comparison regime with Pareto weights frozen at theta_bar: the average-
// discount (egalitarian) Bellman solution, the continuation-utility linear
// program for a pivot discount factor, the pivot-agent dynamic program, the
// sharing-ratio condition and the re-planning witness of inconsistency.
//
// Agent indices are zero-based; agent 0 is the most patient.

#include <cstddef>
#include <vector>

#include "hetdisc/bellman.hpp"
#include "hetdisc/solver.hpp"

namespace hetdisc {

struct ConstWeightConfig {
    SolverConfig solver;   // primitives, grid and horizon; solver.theta0 is ignored here
    WeightVector theta_bar;
    std::vector<double> z_upper;   // continuation-utility bounds z_m; empty = default_z_bounds
    double initial_capital = 0.1;  // k_0 of the witness path
    long replan_period = 20;       // t' of the witness
};

// z_m^i = J_i(k_max) - J_i(k_min), where J_i is the stationary value of a lone
// agent with the common utility and its own discount factor.
std::vector<double> default_z_bounds(const ConstWeightConfig& cfg);

struct LpSolution {
    std::vector<double> z_star;
    std::vector<double> coefficients;  // theta_bar^j (d^j - d^pivot), zero for j >= pivot
    std::vector<std::size_t> active_agents;  // indices with z_star > 0
    double objective = 0.0;
    bool degenerate = false;   // objective identically zero; z_star is all zeros
    bool dictatorial = false;  // a vertex solution pins every weight-bearing z at a bound
};

// Maximizes sum_{j < pivot} theta_bar^j (d^j - d^pivot) z^j over the box
// [0, z_m]. Each positive coefficient sends z^j to its upper bound, every other
// z to zero.
LpSolution continuation_lp(const ConstWeightConfig& cfg, std::size_t pivot);

struct ConstWeightPlan {
    StationaryResult solution;
    double discount = 0.0;
    double transfer = 0.0;  // additive constant sum_{j < pivot} theta_bar^j d^j z_star^j
};

// J(k) = max_y U(f(k) - y, theta_bar) + d_bar J(y), d_bar = sum_i theta_bar^i d^i,
// to sup-norm tolerance 1e-10 (1 - d_bar).
ConstWeightPlan egalitarian_solve(const ConstWeightConfig& cfg);

// J(k) = max_y U(f(k) - y, theta_bar) + d^pivot J(y). The transfer is reported
// beside the solution; with transfer_in_bellman it is also added to the flow.
ConstWeightPlan dictator_solve(std::size_t pivot, const ConstWeightConfig& cfg, bool transfer_in_bellman = false);

struct PivotRow {
    std::size_t pivot;
    LpSolution lp;
    ConstWeightPlan plan;
};

std::vector<PivotRow> pivot_sweep(const ConstWeightConfig& cfg);

struct ImpliedConsumption {
    double value = 0.0;
    bool interior = true;
};

// x_bar^j solving (d^i/d^j)^t = theta_bar^j u'(x_bar^j) / (theta_bar^i u'(x_bar^i)), j < i.
ImpliedConsumption sharing_ratio_condition(long t, std::size_t i, std::size_t j, const WeightVector& theta_bar,
                                           const DiscountProfile& d, double x_bar_i, const LtcfParams& p);

struct InconsistencyReport {
    ReplanReport constant_weights;  // re-plan that restarts from theta_bar
    ReplanReport time_varying;      // re-plan that restarts from theta_{t'}
    TrajectoryRecord plan;          // the period-0 constant-weight plan
};

// The period-0 plan under constant weights theta_bar coincides with the
// time-varying problem started at theta_0 = theta_bar. Re-planning at t' under
// the same recipe resets the weights to theta_bar; the report compares that
// re-plan, and the time-varying one, against the original tail.
InconsistencyReport inconsistency_witness(const ConstWeightConfig& cfg);

}  // namespace hetdisc
