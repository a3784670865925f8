#pragma once

// Capital grids, value-function interpolation and the one-step savings
// maximization shared by the nonstationary and stationary solvers.

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "hetdisc/prefs_tech.hpp"

namespace hetdisc {

enum class Interpolation {
    Linear,         // piecewise linear; non-expansive in the sup norm
    MonotoneCubic,  // shape-preserving cubic Hermite (PCHIP)
};

// n evenly spaced nodes on [k_min, k_max].
std::vector<double> make_capital_grid(double k_min, double k_max, std::size_t n);

// Interpolated value function over a capital grid. Queries outside the grid
// are clamped to its end points. Cheap to copy.
class ValueFunction {
public:
    ValueFunction() = default;
    ValueFunction(std::vector<double> grid, std::vector<double> values, Interpolation kind);

    double operator()(double k) const;

    [[nodiscard]] std::span<const double> grid() const;
    [[nodiscard]] std::span<const double> values() const;
    [[nodiscard]] Interpolation kind() const;
    [[nodiscard]] bool empty() const { return impl_ == nullptr; }

private:
    struct Impl;
    std::shared_ptr<const Impl> impl_;
};

using FlowUtility = std::function<double(double)>;

struct SavingsChoice {
    double next_capital;
    double value;
};

// Feasible next-period capital for output y_out: [k_lo, min(y_out - x_floor, k_hi)].
// Returns false when the interval is empty.
bool feasible_savings(double output, double x_floor, double k_lo, double k_hi, double& lo, double& hi);

// max over y in [lo, hi] of flow(output - y) + discount * continuation(y), by
// golden-section search over the (concave) objective; end points are checked
// after the search. Choices yielding -inf flow are never selected unless the
// whole interval is -inf, in which case SolverError is thrown.
SavingsChoice maximize_savings(double output, double lo, double hi, const FlowUtility& flow, double discount,
                               const ValueFunction& continuation);

struct StationaryOptions {
    double tolerance = 1e-10;  // stop once sup |TV - V| <= tolerance
    int max_iterations = 5000;
    int howard_steps = 40;     // policy-evaluation sweeps between maximizations; 0 = plain value iteration
    Interpolation interpolation = Interpolation::MonotoneCubic;
    int threads = 0;           // 0 = OpenMP default
};

struct StationaryResult {
    std::vector<double> grid;
    std::vector<double> policy;  // next-period capital per node
    std::vector<double> value;
    ValueFunction value_fn;
    int iterations = 0;
    std::vector<double> sup_diffs;  // sup |TV - V| after each maximization step
    bool converged = false;
};

// Stationary Bellman J(k) = max_y flow(f(k) - y) + discount J(y) on the grid.
// Throws SolverError when the iteration cap is reached.
StationaryResult solve_stationary(std::vector<double> grid, const Technology& tech, const FlowUtility& flow,
                                  double x_floor, double discount, const StationaryOptions& options);

}  // namespace hetdisc
