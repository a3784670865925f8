#include "hetdisc/solver.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <stdexcept>
#include <string>

#include "hetdisc/errors.hpp"
#include "hetdisc/sharing.hpp"

namespace hetdisc {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

int thread_count(const SolverConfig& c) { return c.threads > 0 ? c.threads : omp_get_max_threads(); }

LtcfParams group_prefs(const SolverConfig& c) {
    return c.prefs.with_shift_scaled(static_cast<double>(c.agents()));
}

// Û evaluated with arguments nudged up to the floor; golden-section end points
// can land a rounding error below it.
FlowUtility reduced_flow(const LtcfParams& group) {
    const double floor = group.consumption_floor();
    return [group, floor](double x) { return ltcf_utility(std::max(x, floor), group); };
}

FlowUtility raw_flow(const LtcfParams& prefs, const WeightVector& theta, double floor) {
    return [prefs, theta, floor](double x) { return aggregate_utility(std::max(x, floor), theta.values(), prefs); };
}

// (sum theta^(1/g))^g, the factor linking U(., theta) to Û.
double weight_scale(const WeightVector& theta, double g) {
    if (g == 1.0) return 1.0;
    double s = 0.0;
    for (double v : theta.values()) s += std::pow(v, 1.0 / g);
    return std::pow(s, g);
}

struct PeriodInputs {
    std::vector<WeightVector> theta;  // t = 0..T
    std::vector<double> discount;     // t = 0..T-1
    std::vector<double> scale;        // t = 0..T
};

PeriodInputs period_inputs(const SolverConfig& c) {
    const long T = c.horizon;
    PeriodInputs in;
    in.theta.reserve(static_cast<std::size_t>(T) + 1);
    for (long t = 0; t <= T; ++t) in.theta.push_back(weights_at(c.theta0, c.discounts, t));
    const DiscountSequence seq = discount_sequences(c.theta0, c.discounts, T);
    const bool effective = c.formulation == Formulation::Effective;
    in.scale = effective ? seq.beta_hat : seq.beta;
    in.discount.resize(static_cast<std::size_t>(T));
    for (long t = 0; t < T; ++t) {
        const auto& th = in.theta[static_cast<std::size_t>(t)].values();
        in.discount[static_cast<std::size_t>(t)] = effective ? effective_mu(th, c.discounts) : mu(th, c.discounts);
    }
    return in;
}

}  // namespace

void SolverConfig::validate(bool allow_short_horizon) const {
    if (grid_size < 64) throw std::invalid_argument("solver: grid_size must be at least 64");
    if (!(k_min > 0.0) || !std::isfinite(k_min)) throw std::invalid_argument("solver: k_min must be positive");
    if (!(k_min < tech.k_max())) throw std::invalid_argument("solver: k_min must lie below k_max");
    if (horizon < 1 || (!allow_short_horizon && horizon < 10)) {
        throw std::invalid_argument("solver: horizon must be at least 10");
    }
    if (!(tolerance > 0.0)) throw std::invalid_argument("solver: tolerance must be positive");
    if (prefs.mode == UtilityMode::Exponential) {
        throw std::invalid_argument("solver: the exponential limit has no reduced-form solver");
    }
    if (discounts.size() != theta0.size()) {
        throw std::invalid_argument("solver: theta0 and delta have different lengths");
    }
    if (std::abs(discounts.gamma() - prefs.curvature()) > 1e-12 * prefs.curvature()) {
        throw std::invalid_argument("solver: discount profile gamma differs from the utility curvature");
    }
    for (double v : theta0.values()) {
        if (!(v > 0.0)) throw std::invalid_argument("solver: every initial weight must be strictly positive");
    }
    const double floor = group_prefs(*this).consumption_floor();
    if (!(tech.output(k_min) - k_min > floor)) {
        throw std::invalid_argument("solver: f(k_min) - k_min leaves no consumption above the floor");
    }
}

PolicyTable solve_nsf(const SolverConfig& config) {
    config.validate(true);
    const long T = config.horizon;
    const std::size_t n = config.grid_size;
    const LtcfParams group = group_prefs(config);
    const double x_floor = group.consumption_floor();
    const int threads = thread_count(config);

    PolicyTable table;
    table.formulation = config.formulation;
    table.tail = config.tail;
    table.grid = make_capital_grid(config.k_min, config.tech.k_max(), n);
    const auto& grid = table.grid;

    std::vector<double> out(n), lo(n), hi(n);
    for (std::size_t j = 0; j < n; ++j) {
        out[j] = config.tech.output(grid[j]);
        if (!feasible_savings(out[j], x_floor, grid.front(), grid.back(), lo[j], hi[j])) {
            throw SolverError("solve_nsf: empty feasible set at k = " + std::to_string(grid[j]));
        }
    }

    PeriodInputs in = period_inputs(config);
    table.discount = in.discount;
    table.scale = in.scale;
    const auto rows = static_cast<std::size_t>(T) + 1;
    table.next_capital.assign(rows, std::vector<double>(n));
    table.consumption.assign(rows, std::vector<double>(n));
    table.value.assign(rows, std::vector<double>(n));
    table.value_fn.resize(rows);

    const bool effective = config.formulation == Formulation::Effective;
    auto flow_at = [&](long t) {
        return effective ? reduced_flow(group) : raw_flow(config.prefs, in.theta[static_cast<std::size_t>(t)], x_floor);
    };

    // Tail row.
    auto& tail_k = table.next_capital.back();
    auto& tail_v = table.value.back();
    if (config.tail == TailMode::DictatorContinuation) {
        StationaryOptions opts;
        opts.tolerance = config.tolerance;
        opts.interpolation = config.interpolation;
        opts.threads = config.threads;
        StationaryResult J = solve_stationary(grid, config.tech, reduced_flow(group), x_floor,
                                              config.discounts.most_patient(), opts);
        const double s = effective ? 1.0 : weight_scale(in.theta.back(), group.curvature());
        tail_k = J.policy;
        for (std::size_t j = 0; j < n; ++j) tail_v[j] = s * J.value[j];
        table.tail_solution = std::move(J);
    } else {
        const FlowUtility flow = flow_at(T);
        for (std::size_t j = 0; j < n; ++j) {
            tail_k[j] = grid.front();
            tail_v[j] = flow(out[j] - grid.front());
        }
    }
    for (std::size_t j = 0; j < n; ++j) table.consumption.back()[j] = out[j] - tail_k[j];
    table.value_fn.back() = ValueFunction(grid, tail_v, config.interpolation);

    for (long t = T - 1; t >= 0; --t) {
        const auto ti = static_cast<std::size_t>(t);
        const FlowUtility flow = flow_at(t);
        const double r = table.discount[ti];
        const ValueFunction& next = table.value_fn[ti + 1];
        auto& pol = table.next_capital[ti];
        auto& val = table.value[ti];
        std::exception_ptr failure;
#pragma omp parallel for schedule(static) num_threads(threads)
        for (std::size_t j = 0; j < n; ++j) {
            try {
                const SavingsChoice c = maximize_savings(out[j], lo[j], hi[j], flow, r, next);
                pol[j] = c.next_capital;
                val[j] = c.value;
            } catch (...) {
#pragma omp critical(hetdisc_nsf_failure)
                if (!failure) failure = std::current_exception();
            }
        }
        if (failure) std::rethrow_exception(failure);
        for (std::size_t j = 0; j < n; ++j) table.consumption[ti][j] = out[j] - pol[j];
        table.value_fn[ti] = ValueFunction(grid, val, config.interpolation);
    }
    return table;
}

TrajectoryRecord simulate_path(double k0, const PolicyTable& table, const SolverConfig& config) {
    const long T = table.horizon();
    if (T != config.horizon) throw std::invalid_argument("simulate_path: table and config horizons differ");
    const double k_lo = table.grid.front();
    const double k_hi = table.grid.back();
    if (!(k0 >= k_lo && k0 <= k_hi)) {
        throw SolverError("simulate_path: k0 = " + std::to_string(k0) + " lies outside the grid [" +
                          std::to_string(k_lo) + ", " + std::to_string(k_hi) + "]");
    }
    const LtcfParams group = group_prefs(config);
    const double x_floor = group.consumption_floor();
    const bool effective = config.formulation == Formulation::Effective;

    TrajectoryRecord tr;
    const DiscountSequence seq = discount_sequences(config.theta0, config.discounts, T);
    tr.beta = seq.beta;
    tr.beta_hat = seq.beta_hat;
    tr.mu = seq.mu;
    tr.mu_hat = seq.mu_hat;

    double k = k0;
    for (long t = 0; t <= T; ++t) {
        const auto ti = static_cast<std::size_t>(t);
        tr.theta.push_back(weights_at(config.theta0, config.discounts, t));
        const double y_out = config.tech.output(k);
        double lo = 0.0;
        double hi = 0.0;
        if (!feasible_savings(y_out, x_floor, k_lo, k_hi, lo, hi)) {
            throw SolverError("simulate_path: empty feasible set at t = " + std::to_string(t));
        }
        double k_next = k_lo;
        if (t < T) {
            const FlowUtility flow = effective ? reduced_flow(group) : raw_flow(config.prefs, tr.theta.back(), x_floor);
            k_next = maximize_savings(y_out, lo, hi, flow, table.discount[ti], table.value_fn[ti + 1]).next_capital;
        } else if (table.tail == TailMode::DictatorContinuation) {
            k_next = maximize_savings(y_out, lo, hi, reduced_flow(group), config.discounts.most_patient(),
                                      table.tail_solution->value_fn)
                         .next_capital;
        }
        const double x = y_out - k_next;
        tr.k.push_back(k);
        tr.x.push_back(x);
        SharingOutcome s = sharing_rule(x, tr.theta.back().values(), config.prefs);
        tr.shares_interior.push_back(s.interior());
        tr.shares.push_back(std::move(s.shares));
        k = k_next;
    }
    tr.k_terminal = k;
    EulerResiduals r = euler_residual(tr, config);
    tr.euler = std::move(r.values);
    tr.euler_valid = std::move(r.valid);
    return tr;
}

EulerResiduals euler_residual(const TrajectoryRecord& traj, const SolverConfig& config) {
    const long T = traj.horizon();
    const std::size_t agents = config.agents();
    const LtcfParams group = group_prefs(config);
    const double floor = group.consumption_floor();
    const double k_lo = config.k_min * (1.0 + 1e-9);
    EulerResiduals r;
    r.values.assign(static_cast<std::size_t>(T) + 1, kNaN);
    r.valid.assign(static_cast<std::size_t>(T) + 1, false);
    for (long t = 0; t < T; ++t) {
        const auto ti = static_cast<std::size_t>(t);
        const double x0 = traj.x[ti];
        const double x1 = traj.x[ti + 1];
        const double k1 = traj.k[ti + 1];
        if (!(x0 > floor && x1 > floor && k1 > k_lo)) continue;
        const double lhs = traj.beta_hat[ti] * reduced_marginal_uhat(x0, config.prefs, agents);
        const double rhs = traj.beta_hat[ti + 1] * reduced_marginal_uhat(x1, config.prefs, agents) *
                           config.tech.marginal_product(k1);
        r.values[ti] = 1.0 - rhs / lhs;
        r.valid[ti] = true;
    }
    return r;
}

double max_abs_residual(const EulerResiduals& r, long from, long to) {
    double m = 0.0;
    for (long t = std::max(0L, from); t <= to && t < static_cast<long>(r.values.size()); ++t) {
        const auto ti = static_cast<std::size_t>(t);
        if (r.valid[ti]) m = std::max(m, std::abs(r.values[ti]));
    }
    return m;
}

ReplanReport replan_from(const TrajectoryRecord& traj, long t_prime, const SolverConfig& config,
                         const std::optional<WeightVector>& restart_weights) {
    const long T = traj.horizon();
    if (t_prime <= 0 || t_prime >= T) throw std::invalid_argument("replan: t' must lie in (0, T)");
    SolverConfig sub = config;
    sub.theta0 = restart_weights ? *restart_weights : traj.theta[static_cast<std::size_t>(t_prime)];
    sub.horizon = T - t_prime;
    sub.validate(true);

    ReplanReport rep;
    rep.t_prime = t_prime;
    const PolicyTable table = solve_nsf(sub);
    rep.replanned = simulate_path(traj.k[static_cast<std::size_t>(t_prime)], table, sub);

    auto compare = [&](double original, double replanned, long period) {
        const double gap = std::abs(replanned - original);
        const double rel = gap / std::abs(original);
        rep.max_abs = std::max(rep.max_abs, gap);
        rep.max_rel = std::max(rep.max_rel, rel);
        if (rep.first_disagreement < 0 && rel > 1e-6) rep.first_disagreement = period;
    };
    for (long s = 0; s <= sub.horizon; ++s) {
        compare(traj.k[static_cast<std::size_t>(t_prime + s)], rep.replanned.k[static_cast<std::size_t>(s)],
                t_prime + s);
    }
    compare(traj.k_terminal, rep.replanned.k_terminal, T + 1);
    return rep;
}

ReplanReport replan_check(const TrajectoryRecord& traj, long t_prime, const SolverConfig& config) {
    if (!(t_prime > 0 && 2 * t_prime < traj.horizon())) {
        throw std::invalid_argument("replan_check: t' must satisfy 0 < t' < T/2");
    }
    return replan_from(traj, t_prime, config);
}

double max_policy_gap(const PolicyTable& a, const PolicyTable& b) {
    if (a.next_capital.size() != b.next_capital.size() || a.grid.size() != b.grid.size()) {
        throw std::invalid_argument("max_policy_gap: tables have different shapes");
    }
    double m = 0.0;
    for (std::size_t t = 0; t < a.next_capital.size(); ++t) {
        for (std::size_t j = 0; j < a.grid.size(); ++j) {
            const double ref = std::abs(b.next_capital[t][j]);
            m = std::max(m, std::abs(a.next_capital[t][j] - b.next_capital[t][j]) / ref);
        }
    }
    return m;
}

}  // namespace hetdisc
