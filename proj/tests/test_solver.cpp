#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numeric>

#include "hetdisc/errors.hpp"
#include "hetdisc/sharing.hpp"
#include "hetdisc/solver.hpp"
#include "support.hpp"

namespace hetdisc {
namespace {

using testing::make_config;

constexpr double kA = 0.36;

// Solves are shared across tests; each key is built once per process.
const PolicyTable& cached_solve(const std::string& key, const SolverConfig& cfg) {
    static std::map<std::string, PolicyTable> cache;
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, solve_nsf(cfg)).first;
    return it->second;
}

SolverConfig hetero(double gamma, std::size_t grid = 512) { return make_config({0.95, 0.85}, {0.5, 0.5}, gamma, grid); }

TEST(LogOracle, GeometricSumsMatchBackwardRecursion) {
    const std::vector<double> delta{0.95, 0.85};
    const std::vector<double> theta0{0.5, 0.5};
    const long horizon = 3000;
    std::vector<double> d(horizon + 2, 0.0);
    for (long t = horizon; t >= 0; --t) d[t] = kA * (testing::direct_beta(theta0, delta, t) + d[t + 1]);
    for (long t = 0; t <= 60; ++t) {
        double closed = 0.0;
        for (std::size_t i = 0; i < 2; ++i) {
            closed += theta0[i] * kA * std::pow(delta[i], double(t)) / (1 - kA * delta[i]);
        }
        EXPECT_NEAR(d[t], closed, 1e-14 * closed);
        EXPECT_NEAR(testing::log_savings_rate(theta0, delta, kA, t), d[t + 1] / (testing::direct_beta(theta0, delta, t) + d[t + 1]),
                    1e-14);
    }
}

TEST(SolveNsf, BrockMirmanPolicy) {
    const auto cfg = make_config({0.95}, {1.0}, 1.0);
    const auto& table = cached_solve("bm", cfg);
    double worst = 0.0;
    for (long t : {0L, 50L, 199L}) {
        for (std::size_t j = 2; j + 2 < table.grid.size(); ++j) {
            const double expected = kA * 0.95 * std::pow(table.grid[j], kA);
            worst = std::max(worst, std::abs(table.next_capital[t][j] - expected) / expected);
        }
    }
    EXPECT_LE(worst, 1e-3);
}

TEST(SolveNsf, HeterogeneousLogSavingsRate) {
    const std::vector<double> delta{0.95, 0.85};
    const std::vector<double> theta0{0.5, 0.5};
    const auto cfg = make_config(delta, theta0, 1.0);
    const auto& table = cached_solve("log", cfg);
    double worst = 0.0;
    for (long t = 0; t <= 30; ++t) {
        const double sigma = testing::log_savings_rate(theta0, delta, kA, t);
        for (std::size_t j = 2; j + 2 < table.grid.size(); ++j) {
            const double rate = table.next_capital[t][j] / std::pow(table.grid[j], kA);
            worst = std::max(worst, std::abs(rate - sigma) / sigma);
        }
    }
    EXPECT_LE(worst, 1e-3);
}

TEST(SolveNsf, TruncationInsensitivity) {
    for (double g : {1.0, 2.0}) {
        auto dict = hetero(g, 256);
        auto zero = dict;
        zero.tail = TailMode::Zero;
        const auto a = solve_nsf(dict);
        const auto b = solve_nsf(zero);
        double worst = 0.0;
        for (long t = 0; t <= dict.horizon / 2; ++t) {
            for (std::size_t j = 0; j < a.grid.size(); ++j) {
                worst = std::max(worst, std::abs(a.next_capital[t][j] - b.next_capital[t][j]) / a.next_capital[t][j]);
            }
        }
        EXPECT_LE(worst, 1e-4) << "gamma " << g;
    }
}

TEST(SolveNsf, TableInvariants) {
    const auto cfg = hetero(2.0);
    const auto& table = cached_solve("g2", cfg);
    ASSERT_EQ(table.horizon(), cfg.horizon);
    const auto seq = discount_sequences(cfg.theta0, cfg.discounts, cfg.horizon);
    for (long t = 0; t <= table.horizon(); ++t) {
        const auto& y = table.next_capital[t];
        const auto& v = table.value[t];
        for (std::size_t j = 0; j < table.grid.size(); ++j) {
            const double out = cfg.tech.output(table.grid[j]);
            EXPECT_GE(y[j], cfg.k_min);
            EXPECT_LE(y[j], out);
            EXPECT_GT(reduced_utility_uhat(out - y[j], cfg.prefs, 2), kNegInf);
            EXPECT_NEAR(table.consumption[t][j], out - y[j], 1e-15);
            if (j > 0) {
                EXPECT_GT(v[j], v[j - 1]) << "t=" << t << " j=" << j;
                EXPECT_GE(y[j], y[j - 1] - 1e-9) << "t=" << t << " j=" << j;
            }
        }
        EXPECT_NEAR(table.scale[t], seq.beta_hat[t], 1e-14);
        if (t < table.horizon()) EXPECT_NEAR(table.discount[t], seq.mu_hat[t], 1e-15);
    }
}

TEST(SolveNsf, ThreadCountIsBitIdentical) {
    auto one = hetero(2.0, 128);
    one.horizon = 40;
    one.threads = 1;
    auto many = one;
    many.threads = 4;
    const auto a = solve_nsf(one);
    const auto b = solve_nsf(many);
    EXPECT_EQ(a.next_capital, b.next_capital);
    EXPECT_EQ(a.value, b.value);
}

TEST(SolveNsf, ConfigValidation) {
    auto cfg = hetero(2.0);
    cfg.grid_size = 32;
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
    cfg = hetero(2.0);
    cfg.horizon = 5;
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
    EXPECT_NO_THROW(cfg.validate(true));
    cfg = hetero(2.0);
    cfg.k_min = 0.0;
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
    cfg = hetero(2.0);
    cfg.theta0 = WeightVector::from({1.0, 0.0});
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
    cfg = hetero(2.0);
    cfg.discounts = DiscountProfile::make({0.95, 0.85}, 3.0);
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
    cfg = hetero(2.0);
    cfg.prefs = LtcfParams::exponential(1.0);
    EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

TEST(SimulatePath, StaysAtTheSteadyState) {
    for (double g : {1.0, 2.0}) {
        const auto cfg = make_config({0.95}, {1.0}, g);
        const auto table = g == 1.0 ? cached_solve("bm", cfg) : solve_nsf(cfg);
        const double k_star = std::pow(kA * 0.95, 1 / (1 - kA));
        const auto tr = simulate_path(k_star, table, cfg);
        for (long t = 0; t <= tr.horizon(); ++t) EXPECT_NEAR(tr.k[t], k_star, 1e-3 * k_star) << "t=" << t;
    }
}

TEST(SimulatePath, RecordsConsistentSequences) {
    const auto cfg = hetero(2.0);
    const auto& table = cached_solve("g2", cfg);
    const auto tr = simulate_path(0.1, table, cfg);
    ASSERT_EQ(tr.horizon(), cfg.horizon);
    const auto seq = discount_sequences(cfg.theta0, cfg.discounts, cfg.horizon);
    for (long t = 0; t <= tr.horizon(); ++t) {
        const auto ti = static_cast<std::size_t>(t);
        EXPECT_EQ(tr.theta[ti], weights_at(cfg.theta0, cfg.discounts, t));
        const double total = std::accumulate(tr.shares[ti].begin(), tr.shares[ti].end(), 0.0);
        EXPECT_NEAR(total, tr.x[ti], 1e-8);
        EXPECT_TRUE(tr.shares_interior[ti]);
        const double next = t < tr.horizon() ? tr.k[ti + 1] : tr.k_terminal;
        EXPECT_NEAR(tr.x[ti] + next, cfg.tech.output(tr.k[ti]), 1e-12);
        EXPECT_EQ(tr.beta[ti], seq.beta[ti]);
        EXPECT_EQ(tr.beta_hat[ti], seq.beta_hat[ti]);
        EXPECT_EQ(tr.mu_hat[ti], seq.mu_hat[ti]);
    }
}

TEST(SimulatePath, RejectsStartOutsideTheGrid) {
    const auto cfg = hetero(2.0);
    const auto& table = cached_solve("g2", cfg);
    EXPECT_THROW(simulate_path(1e-4, table, cfg), SolverError);
    EXPECT_THROW(simulate_path(2.0, table, cfg), SolverError);
}

// Builds the analytic Brock-Mirman path k' = a d k^a by hand.
TrajectoryRecord brock_mirman_path(const SolverConfig& cfg, double k0, long T) {
    TrajectoryRecord tr;
    double k = k0;
    for (long t = 0; t <= T; ++t) {
        tr.k.push_back(k);
        tr.x.push_back((1 - kA * 0.95) * std::pow(k, kA));
        tr.beta_hat.push_back(std::pow(0.95, double(t)));
        k = kA * 0.95 * std::pow(k, kA);
    }
    tr.k_terminal = k;
    tr.beta = tr.beta_hat;
    (void)cfg;
    return tr;
}

TEST(EulerResidual, VanishesOnTheAnalyticPath) {
    const auto cfg = make_config({0.95}, {1.0}, 1.0);
    const auto tr = brock_mirman_path(cfg, 0.05, 60);
    const auto r = euler_residual(tr, cfg);
    EXPECT_FALSE(r.valid[60]);
    EXPECT_TRUE(std::isnan(r.values[60]));
    for (long t = 0; t < 60; ++t) EXPECT_TRUE(r.valid[t]);
    EXPECT_LE(max_abs_residual(r, 0, 60), 1e-6);
}

TEST(EulerResidual, DetectsAPerturbedPath) {
    const auto cfg = make_config({0.95}, {1.0}, 1.0);
    auto tr = brock_mirman_path(cfg, 0.05, 60);
    tr.x[30] *= 1.1;
    const auto r = euler_residual(tr, cfg);
    EXPECT_GT(std::abs(r.values[30]), 1e-2);
    EXPECT_GT(std::abs(r.values[29]), 1e-2);
}

TEST(EulerResidual, SolverPathWithinBudget) {
    for (double g : {1.0, 2.0}) {
        const auto cfg = hetero(g);
        const auto& table = cached_solve(g == 1.0 ? "log" : "g2", cfg);
        const auto tr = simulate_path(0.1, table, cfg);
        EXPECT_FALSE(tr.euler_valid.back());
        EXPECT_LE(max_abs_residual({tr.euler, tr.euler_valid}, 2, cfg.horizon - 5), 5e-3) << "gamma " << g;
    }
}

TEST(EulerResidual, RefiningTheGridAtLeastHalvesTheResidual) {
    double prev = 0.0;
    for (std::size_t n : {256u, 512u, 1024u}) {
        const auto cfg = hetero(2.0, n);
        const auto tr = simulate_path(0.1, n == 512 ? cached_solve("g2", cfg) : solve_nsf(cfg), cfg);
        const double r = max_abs_residual({tr.euler, tr.euler_valid}, 2, cfg.horizon - 5);
        if (prev > 0.0) EXPECT_LE(r, prev / 2) << "grid " << n;
        prev = r;
    }
}

TEST(Replan, TimeVaryingWeightsAreConsistent) {
    const auto cfg = hetero(2.0);
    const auto tr = simulate_path(0.1, cached_solve("g2", cfg), cfg);
    for (long tp : {1L, 20L, 60L}) {
        const auto rep = replan_check(tr, tp, cfg);
        EXPECT_LE(rep.max_rel, 2 * kInterpolationTolerance) << "t'=" << tp;
        EXPECT_EQ(rep.replanned.horizon(), cfg.horizon - tp);
    }
    EXPECT_THROW(replan_check(tr, 0, cfg), std::invalid_argument);
    EXPECT_THROW(replan_check(tr, 100, cfg), std::invalid_argument);
}

TEST(Replan, HomogeneousDiscountingIsExactlyConsistent) {
    for (const auto& [delta, theta] : std::vector<std::pair<std::vector<double>, std::vector<double>>>{
             {{0.95}, {1.0}}, {{0.9, 0.9}, {0.3, 0.7}}}) {
        const auto cfg = make_config(delta, theta, 2.0);
        const auto tr = simulate_path(0.1, solve_nsf(cfg), cfg);
        const auto rep = replan_check(tr, 20, cfg);
        EXPECT_LE(rep.max_rel, 1e-6);
    }
}

TEST(Formulations, RawAndEffectiveAgree) {
    for (double g : {1.0, 2.0, 0.5}) {
        auto eff = make_config({0.95, 0.9, 0.8}, {0.2, 0.3, 0.5}, g, 256);
        eff.horizon = 60;
        auto raw = eff;
        raw.formulation = Formulation::Raw;
        const auto a = solve_nsf(eff);
        const auto b = solve_nsf(raw);
        EXPECT_LE(max_policy_gap(a, b), kInterpolationTolerance) << "gamma " << g;
        // raw values are effective values rescaled by the weight-dependent factor
        const auto seq = discount_sequences(eff.theta0, eff.discounts, eff.horizon);
        EXPECT_NEAR(b.scale[10], seq.beta[10], 1e-15);
    }
}

}  // namespace
}  // namespace hetdisc
