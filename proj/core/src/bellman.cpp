#include "hetdisc/bellman.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <exception>
#include <optional>
#include <stdexcept>
#include <string>

// Boost 1.74 pchip calls isnan unqualified; <math.h> puts it in the global namespace.
#include <math.h>

#include <boost/math/interpolators/pchip.hpp>

#include "hetdisc/errors.hpp"

namespace hetdisc {

namespace {

// Three-point end-point slope with the usual shape-preserving safeguards.
double end_slope(double h1, double h2, double d1, double d2) {
    double s = ((2.0 * h1 + h2) * d1 - h1 * d2) / (h1 + h2);
    if (std::signbit(s) != std::signbit(d1) || s == 0.0 || d1 == 0.0) return 0.0;
    if (std::signbit(d1) != std::signbit(d2) && std::abs(s) > 3.0 * std::abs(d1)) s = 3.0 * d1;
    return s;
}

}  // namespace

struct ValueFunction::Impl {
    std::vector<double> grid;
    std::vector<double> values;
    Interpolation kind;
    std::optional<boost::math::interpolators::pchip<std::vector<double>>> cubic;

    double linear(double k) const {
        auto it = std::upper_bound(grid.begin(), grid.end(), k);
        std::size_t j = static_cast<std::size_t>(it - grid.begin());
        j = std::clamp<std::size_t>(j, 1, grid.size() - 1);
        const double w = (k - grid[j - 1]) / (grid[j] - grid[j - 1]);
        return values[j - 1] + w * (values[j] - values[j - 1]);
    }
};

std::vector<double> make_capital_grid(double k_min, double k_max, std::size_t n) {
    if (n < 2) throw std::invalid_argument("capital grid needs at least two nodes");
    if (!(k_min > 0.0 && k_min < k_max)) throw std::invalid_argument("capital grid needs 0 < k_min < k_max");
    std::vector<double> grid(n);
    const double step = (k_max - k_min) / static_cast<double>(n - 1);
    for (std::size_t j = 0; j < n; ++j) grid[j] = k_min + step * static_cast<double>(j);
    grid.back() = k_max;
    return grid;
}

ValueFunction::ValueFunction(std::vector<double> grid, std::vector<double> values, Interpolation kind) {
    if (grid.size() != values.size()) throw std::invalid_argument("value function: grid/value size mismatch");
    if (grid.size() < 4) throw std::invalid_argument("value function: need at least four nodes");
    for (double v : values) {
        if (!std::isfinite(v)) throw SolverError("value function: non-finite value on the grid");
    }
    auto impl = std::make_shared<Impl>();
    impl->grid = grid;
    impl->values = values;
    impl->kind = kind;
    if (kind == Interpolation::MonotoneCubic) {
        const std::size_t n = grid.size();
        const double h1 = grid[1] - grid[0];
        const double h2 = grid[2] - grid[1];
        const double left = end_slope(h1, h2, (values[1] - values[0]) / h1, (values[2] - values[1]) / h2);
        const double g1 = grid[n - 1] - grid[n - 2];
        const double g2 = grid[n - 2] - grid[n - 3];
        const double right = end_slope(g1, g2, (values[n - 1] - values[n - 2]) / g1,
                                       (values[n - 2] - values[n - 3]) / g2);
        impl->cubic.emplace(std::move(grid), std::move(values), left, right);
    }
    impl_ = std::move(impl);
}

double ValueFunction::operator()(double k) const {
    const Impl& m = *impl_;
    k = std::clamp(k, m.grid.front(), m.grid.back());
    if (m.kind == Interpolation::Linear) return m.linear(k);
    return (*m.cubic)(k);
}

std::span<const double> ValueFunction::grid() const { return impl_->grid; }
std::span<const double> ValueFunction::values() const { return impl_->values; }
Interpolation ValueFunction::kind() const { return impl_->kind; }

bool feasible_savings(double output, double x_floor, double k_lo, double k_hi, double& lo, double& hi) {
    lo = k_lo;
    hi = std::min(output - x_floor, k_hi);
    return hi >= lo;
}

SavingsChoice maximize_savings(double output, double lo, double hi, const FlowUtility& flow, double discount,
                               const ValueFunction& continuation) {
    auto objective = [&](double y) {
        const double u = flow(output - y);
        if (u == kNegInf) return kNegInf;
        return u + discount * continuation(y);
    };

    constexpr double inv_phi = 0.6180339887498949;
    double a = lo;
    double b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = objective(c);
    double fd = objective(d);
    const double tol = 1e-12 * std::max(1.0, std::abs(hi));
    for (int it = 0; it < 200 && (b - a) > tol; ++it) {
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = objective(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = objective(d);
        }
    }
    SavingsChoice best{fc >= fd ? c : d, std::max(fc, fd)};
    for (double y : {lo, hi}) {
        const double v = objective(y);
        if (v > best.value) best = {y, v};
    }
    if (best.value == kNegInf || std::isnan(best.value)) {
        throw SolverError("empty feasible set: every choice in [" + std::to_string(lo) + ", " + std::to_string(hi) +
                          "] forces -inf utility");
    }
    return best;
}

StationaryResult solve_stationary(std::vector<double> grid, const Technology& tech, const FlowUtility& flow,
                                  double x_floor, double discount, const StationaryOptions& options) {
    if (!(discount > 0.0 && discount < 1.0)) throw std::invalid_argument("stationary solve: discount must lie in (0, 1)");
    const std::size_t n = grid.size();
    std::vector<double> lo(n);
    std::vector<double> hi(n);
    std::vector<double> out(n);
    for (std::size_t j = 0; j < n; ++j) {
        out[j] = tech.output(grid[j]);
        if (!feasible_savings(out[j], x_floor, grid.front(), grid.back(), lo[j], hi[j])) {
            throw SolverError("stationary solve: empty feasible set at k = " + std::to_string(grid[j]));
        }
    }

    StationaryResult res;
    res.grid = grid;
    res.policy.assign(n, grid.front());
    res.value.assign(n, 0.0);
    ValueFunction current(grid, res.value, options.interpolation);
    std::vector<double> next(n);
    const int threads = options.threads > 0 ? options.threads : omp_get_max_threads();

    for (int iter = 1; iter <= options.max_iterations; ++iter) {
        std::exception_ptr failure;
#pragma omp parallel for schedule(static) num_threads(threads)
        for (std::size_t j = 0; j < n; ++j) {
            try {
                const SavingsChoice c = maximize_savings(out[j], lo[j], hi[j], flow, discount, current);
                res.policy[j] = c.next_capital;
                next[j] = c.value;
            } catch (...) {
#pragma omp critical(hetdisc_stationary_failure)
                if (!failure) failure = std::current_exception();
            }
        }
        if (failure) std::rethrow_exception(failure);

        double diff = 0.0;
        for (std::size_t j = 0; j < n; ++j) diff = std::max(diff, std::abs(next[j] - res.value[j]));
        res.sup_diffs.push_back(diff);
        res.value = next;
        res.iterations = iter;
        current = ValueFunction(grid, res.value, options.interpolation);
        if (diff <= options.tolerance) {
            res.converged = true;
            break;
        }
        // Policy evaluation sweeps with the policy held fixed.
        std::vector<double> flows(n);
        for (std::size_t j = 0; j < n; ++j) flows[j] = flow(out[j] - res.policy[j]);
        for (int h = 0; h < options.howard_steps; ++h) {
            for (std::size_t j = 0; j < n; ++j) next[j] = flows[j] + discount * current(res.policy[j]);
            res.value = next;
            current = ValueFunction(grid, res.value, options.interpolation);
        }
    }
    if (!res.converged) {
        throw SolverError("stationary solve: no convergence after " + std::to_string(options.max_iterations) +
                          " iterations (last sup diff " + std::to_string(res.sup_diffs.back()) + ")");
    }
    res.value_fn = current;
    return res;
}

}  // namespace hetdisc
