#include "hetdisc/constweights.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "hetdisc/errors.hpp"
#include "hetdisc/sharing.hpp"

namespace hetdisc {

namespace {

void check_config(const ConstWeightConfig& cfg) {
    const SolverConfig& s = cfg.solver;
    if (s.grid_size < 64) throw std::invalid_argument("constant weights: grid_size must be at least 64");
    if (!(s.k_min > 0.0 && s.k_min < s.tech.k_max())) {
        throw std::invalid_argument("constant weights: need 0 < k_min < k_max");
    }
    if (s.prefs.mode == UtilityMode::Exponential) {
        throw std::invalid_argument("constant weights: the exponential limit is not supported");
    }
    if (cfg.theta_bar.size() != s.discounts.size()) {
        throw std::invalid_argument("constant weights: theta_bar and delta have different lengths");
    }
}

std::vector<double> grid_of(const SolverConfig& s) { return make_capital_grid(s.k_min, s.tech.k_max(), s.grid_size); }

StationaryOptions options_for(const SolverConfig& s, double discount) {
    StationaryOptions o;
    o.tolerance = 1e-10 * (1.0 - discount);
    o.interpolation = s.interpolation;
    o.threads = s.threads;
    return o;
}

FlowUtility weighted_flow(const ConstWeightConfig& cfg, double shift) {
    const LtcfParams p = cfg.solver.prefs;
    const WeightVector theta = cfg.theta_bar;
    const double floor = p.with_shift_scaled(static_cast<double>(theta.size())).consumption_floor();
    return [p, theta, floor, shift](double x) {
        return aggregate_utility(std::max(x, floor), theta.values(), p) + shift;
    };
}

double group_floor(const ConstWeightConfig& cfg) {
    return cfg.solver.prefs.with_shift_scaled(static_cast<double>(cfg.theta_bar.size())).consumption_floor();
}

}  // namespace

std::vector<double> default_z_bounds(const ConstWeightConfig& cfg) {
    check_config(cfg);
    const SolverConfig& s = cfg.solver;
    const LtcfParams p = s.prefs;
    const double floor = p.consumption_floor();
    const FlowUtility flow = [p, floor](double x) { return ltcf_utility(std::max(x, floor), p); };
    std::vector<double> z;
    for (double delta : s.discounts.delta()) {
        const StationaryResult J = solve_stationary(grid_of(s), s.tech, flow, floor, delta, options_for(s, delta));
        z.push_back(J.value.back() - J.value.front());
    }
    return z;
}

LpSolution continuation_lp(const ConstWeightConfig& cfg, std::size_t pivot) {
    check_config(cfg);
    const auto& delta = cfg.solver.discounts.delta();
    const std::size_t n = delta.size();
    if (pivot >= n) throw std::invalid_argument("continuation_lp: pivot " + std::to_string(pivot) + " out of range");
    const std::vector<double> zm = cfg.z_upper.empty() ? default_z_bounds(cfg) : cfg.z_upper;
    if (zm.size() != n) throw std::invalid_argument("continuation_lp: z bounds have the wrong length");
    for (double v : zm) {
        if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument("continuation_lp: z bounds must be positive");
    }

    LpSolution lp;
    lp.z_star.assign(n, 0.0);
    lp.coefficients.assign(n, 0.0);
    for (std::size_t j = 0; j < pivot; ++j) lp.coefficients[j] = cfg.theta_bar[j] * (delta[j] - delta[pivot]);
    for (std::size_t j = 0; j < n; ++j) {
        if (lp.coefficients[j] > 0.0) {
            lp.z_star[j] = zm[j];
            lp.active_agents.push_back(j);
            lp.objective += lp.coefficients[j] * zm[j];
        }
    }
    lp.degenerate = lp.active_agents.empty();
    lp.dictatorial = !lp.degenerate;
    return lp;
}

ConstWeightPlan egalitarian_solve(const ConstWeightConfig& cfg) {
    check_config(cfg);
    const SolverConfig& s = cfg.solver;
    ConstWeightPlan plan;
    plan.discount = mu(cfg.theta_bar.values(), s.discounts);
    plan.solution = solve_stationary(grid_of(s), s.tech, weighted_flow(cfg, 0.0), group_floor(cfg), plan.discount,
                                     options_for(s, plan.discount));
    return plan;
}

ConstWeightPlan dictator_solve(std::size_t pivot, const ConstWeightConfig& cfg, bool transfer_in_bellman) {
    check_config(cfg);
    const SolverConfig& s = cfg.solver;
    const LpSolution lp = continuation_lp(cfg, pivot);
    ConstWeightPlan plan;
    plan.discount = s.discounts.delta()[pivot];
    for (std::size_t j = 0; j < pivot; ++j) {
        plan.transfer += cfg.theta_bar[j] * s.discounts.delta()[j] * lp.z_star[j];
    }
    const double shift = transfer_in_bellman ? plan.transfer : 0.0;
    plan.solution = solve_stationary(grid_of(s), s.tech, weighted_flow(cfg, shift), group_floor(cfg), plan.discount,
                                     options_for(s, plan.discount));
    return plan;
}

std::vector<PivotRow> pivot_sweep(const ConstWeightConfig& cfg) {
    check_config(cfg);
    ConstWeightConfig fixed = cfg;
    if (fixed.z_upper.empty()) fixed.z_upper = default_z_bounds(cfg);
    std::vector<PivotRow> rows;
    for (std::size_t i = 0; i < fixed.theta_bar.size(); ++i) {
        rows.push_back({i, continuation_lp(fixed, i), dictator_solve(i, fixed)});
    }
    return rows;
}

ImpliedConsumption sharing_ratio_condition(long t, std::size_t i, std::size_t j, const WeightVector& theta_bar,
                                           const DiscountProfile& d, double x_bar_i, const LtcfParams& p) {
    if (!(j < i && i < d.size())) throw std::invalid_argument("sharing_ratio_condition: need j < i < n");
    if (theta_bar.size() != d.size()) throw std::invalid_argument("sharing_ratio_condition: size mismatch");
    if (t < 0) throw std::invalid_argument("sharing_ratio_condition: negative period");
    if (!(theta_bar[i] > 0.0 && theta_bar[j] > 0.0)) {
        throw std::invalid_argument("sharing_ratio_condition: both weights must be positive");
    }
    if (!(x_bar_i > p.consumption_floor())) {
        throw DomainError("sharing_ratio_condition: x_bar_i must lie above the consumption floor");
    }
    const double log_ratio = static_cast<double>(t) * (std::log(d.delta()[i]) - std::log(d.delta()[j]));
    const double m = std::exp(log_ratio) * theta_bar[i] * ltcf_marginal(x_bar_i, p) / theta_bar[j];
    ImpliedConsumption out;
    out.value = ltcf_marginal_inverse(m, p);
    out.interior = std::isfinite(out.value) && out.value > p.consumption_floor();
    return out;
}

InconsistencyReport inconsistency_witness(const ConstWeightConfig& cfg) {
    check_config(cfg);
    for (double v : cfg.theta_bar.values()) {
        if (!(v > 0.0)) throw std::invalid_argument("inconsistency_witness: theta_bar must be strictly positive");
    }
    SolverConfig s = cfg.solver;
    s.theta0 = cfg.theta_bar;
    s.validate();
    const PolicyTable table = solve_nsf(s);

    InconsistencyReport rep;
    rep.plan = simulate_path(cfg.initial_capital, table, s);
    rep.constant_weights = replan_from(rep.plan, cfg.replan_period, s, cfg.theta_bar);
    rep.time_varying = replan_check(rep.plan, cfg.replan_period, s);
    return rep;
}

}  // namespace hetdisc
