#include <benchmark/benchmark.h>

#include <vector>

#include "hetdisc/sharing.hpp"
#include "hetdisc/solver.hpp"
#include "hetdisc/weights.hpp"

namespace {

using namespace hetdisc;

SolverConfig two_agent_config(std::size_t grid, double gamma) {
    return SolverConfig{
        .prefs = LtcfParams::make(gamma, 1.0, 0.0),
        .tech = Technology::make(1.0, 0.36),
        .discounts = DiscountProfile::make({0.95, 0.85}, gamma),
        .theta0 = WeightVector::normalized({0.5, 0.5}),
        .grid_size = grid,
        .horizon = 200,
    };
}

void BM_SolveNsf(benchmark::State& state) {
    const auto cfg = two_agent_config(static_cast<std::size_t>(state.range(0)), 2.0);
    for (auto _ : state) benchmark::DoNotOptimize(solve_nsf(cfg));
}
BENCHMARK(BM_SolveNsf)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_SharingRule(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const std::vector<double> theta(n, 1.0 / static_cast<double>(n));
    const auto p = LtcfParams::make(2.0, 1.0, 0.1);
    double x = 5.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(sharing_rule(x, theta, p));
        x += 1e-9;
    }
}
BENCHMARK(BM_SharingRule)->Arg(2)->Arg(8)->Arg(64);

void BM_WeightsAt(benchmark::State& state) {
    const auto d = DiscountProfile::make({0.97, 0.9, 0.8}, 2.0);
    const auto theta0 = WeightVector::normalized({0.2, 0.3, 0.5});
    long t = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(weights_at(theta0, d, t));
        t = (t + 1) % 1000;
    }
}
BENCHMARK(BM_WeightsAt);

}  // namespace

BENCHMARK_MAIN();
