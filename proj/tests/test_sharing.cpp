#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "hetdisc/errors.hpp"
#include "hetdisc/sharing.hpp"
#include "support.hpp"

namespace hetdisc {
namespace {

using Vec = std::vector<double>;

double sum(const Vec& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

TEST(SharingRule, LogSharesAreProportionalToWeights) {
    const auto out = sharing_rule(5.0, Vec{0.8, 0.2}, LtcfParams::make(1, 1, 0));
    EXPECT_NEAR(out.shares[0], 4.0, 1e-14);
    EXPECT_NEAR(out.shares[1], 1.0, 1e-14);
    EXPECT_TRUE(out.interior());
}

TEST(SharingRule, SymmetricWeightsSplitEqually) {
    for (double g : {0.5, 1.0, 3.0}) {
        const auto out = sharing_rule(6.0, Vec{1.0 / 3, 1.0 / 3, 1.0 / 3}, LtcfParams::make(g, 1, 0));
        for (double s : out.shares) EXPECT_NEAR(s, 2.0, 1e-14);
    }
}

TEST(SharingRule, CurvatureTwoExample) {
    const auto out = sharing_rule(3.0, Vec{0.8, 0.2}, LtcfParams::make(2, 1, 0));
    EXPECT_NEAR(out.a_coeffs[0], 2.0 / 3, 1e-15);
    EXPECT_NEAR(out.shares[0], 2.0, 1e-14);
    EXPECT_NEAR(out.shares[1], 1.0, 1e-14);
}

TEST(SharingRule, InvariantsOnRandomDraws) {
    testing::Sampler s(31);
    int interior = 0;
    for (int k = 0; k < 500; ++k) {
        const std::size_t n = static_cast<std::size_t>(s.integer(1, 6));
        const auto p = LtcfParams::make(s.uniform(0.3, 5), s.uniform(0.5, 2), s.uniform(0, 1));
        const Vec theta = s.simplex(n, 0.05);
        const double x = s.uniform(0.0, 10);
        const auto out = sharing_rule(x, theta, p);
        EXPECT_NEAR(sum(out.shares), x, 1e-10);
        EXPECT_EQ(out.interior(), x >= testing::interior_threshold(theta, p) * (1 - 1e-12));
        for (const auto& v : out.violations) EXPECT_LT(out.shares[v.agent], v.floor);
        if (!out.interior()) continue;
        ++interior;
        EXPECT_NEAR(sum(out.a_coeffs), 1.0, 1e-10);
        EXPECT_NEAR(sum(out.b_coeffs), 0.0, 1e-10);
        for (std::size_t i = 0; i < n; ++i) {
            EXPECT_NEAR(theta[i] * ltcf_marginal(out.shares[i], p), out.lambda, 1e-8 * std::max(1.0, out.lambda));
        }
    }
    EXPECT_GT(interior, 250);
}

TEST(SharingRule, NegativeShareIsReportedWithTheAgent) {
    // A positive shift makes the low-weight agent's intercept negative at small x.
    const auto out = sharing_rule(0.5, Vec{0.95, 0.05}, LtcfParams::make(2, 1, 1));
    ASSERT_FALSE(out.interior());
    ASSERT_EQ(out.violations.size(), 1u);
    EXPECT_EQ(out.violations.front().agent, 1u);
    EXPECT_LT(out.shares[1], 0.0);
    EXPECT_NEAR(sum(out.shares), 0.5, 1e-12);
    try {
        require_interior(out);
        FAIL() << "expected DomainError";
    } catch (const DomainError& e) {
        EXPECT_NE(std::string(e.what()).find("agent 2"), std::string::npos);
    }
}

TEST(SharingRule, StoneGearyBelowGroupFloorViolatesEveryAgent) {
    // floor 0.2 per agent, 0.4 for the pair
    const auto out = sharing_rule(0.3, Vec{0.5, 0.5}, LtcfParams::make(2, 1, -0.1));
    EXPECT_EQ(out.violations.size(), 2u);
    EXPECT_TRUE(std::isnan(out.lambda));
    EXPECT_TRUE(sharing_rule(0.5, Vec{0.99, 0.01}, LtcfParams::make(2, 1, -0.1)).interior());
}

TEST(SharingRule, ZeroConsumptionGivesZeroShares) {
    testing::Sampler s(32);
    for (int k = 0; k < 50; ++k) {
        const auto out = sharing_rule(0.0, s.simplex(3, 0.0), LtcfParams::make(s.uniform(0.3, 4), 1, 0));
        for (double v : out.shares) EXPECT_EQ(v, 0.0);
    }
}

TEST(SharingRule, SharesAreHomogeneousOfDegreeZeroInWeights) {
    testing::Sampler s(33);
    for (int k = 0; k < 100; ++k) {
        const auto p = LtcfParams::make(s.uniform(0.3, 4), 1, s.uniform(0, 1));
        const Vec theta = s.simplex(3, 0.05);
        const double x = s.uniform(0.5, 5);
        const auto base = sharing_rule(x, theta, p);
        for (double xi : {0.5, 2.0, 7.3}) {
            Vec scaled = theta;
            for (double& v : scaled) v *= xi;
            const auto out = sharing_rule(x, scaled, p);
            for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(out.shares[i], base.shares[i], 1e-13);
        }
    }
}

TEST(SharingRule, SlopesMatchFiniteDifferences) {
    testing::Sampler s(34);
    for (int k = 0; k < 100; ++k) {
        const auto p = LtcfParams::make(s.uniform(0.3, 4), s.uniform(0.5, 2), s.uniform(0, 1));
        const Vec theta = s.simplex(3, 0.05);
        const double x = s.uniform(1, 5);
        const double h = 1e-5;
        const auto up = sharing_rule(x + h, theta, p);
        const auto dn = sharing_rule(x - h, theta, p);
        const auto mid = sharing_rule(x, theta, p);
        for (std::size_t i = 0; i < 3; ++i) {
            EXPECT_NEAR((up.shares[i] - dn.shares[i]) / (2 * h), mid.a_coeffs[i], 1e-7);
        }
    }
}

TEST(StaticOracle, AgreesWithClosedFormOnThousandDraws) {
    testing::Sampler s(35);
    int checked = 0;
    // Draws whose closed-form shares leave the domain are redrawn.
    for (int k = 0; checked < 1000 && k < 100000; ++k) {
        const std::size_t n = static_cast<std::size_t>(s.integer(1, 5));
        const auto p = LtcfParams::make(s.uniform(0.2, 6), s.uniform(0.3, 3), s.uniform(0, 1));
        const Vec theta = s.simplex(n, 0.05);
        const double x = s.uniform(0.05, 20);
        const auto closed = sharing_rule(x, theta, p);
        if (!closed.interior()) continue;
        const auto oracle = static_oracle(x, theta, p);
        for (std::size_t i = 0; i < n; ++i) ASSERT_NEAR(oracle.shares[i], closed.shares[i], 1e-8) << "draw " << k;
        EXPECT_NEAR(sum(oracle.shares), x, 1e-10 * std::max(1.0, x));
        ++checked;
    }
    EXPECT_EQ(checked, 1000);
}

TEST(StaticOracle, LogShadowPriceIsInverseConsumption) {
    for (double x : {0.3, 1.0, 7.5}) {
        const auto out = static_oracle(x, Vec{0.3, 0.7}, LtcfParams::make(1, 1, 0));
        EXPECT_NEAR(out.lambda, 1.0 / x, 1e-10 / x);
    }
}

TEST(StaticOracle, SingleAgentTakesEverything) {
    const auto out = static_oracle(2.5, Vec{1.0}, LtcfParams::make(2, 1, 0.3));
    EXPECT_NEAR(out.shares[0], 2.5, 1e-12);
}

TEST(StaticOracle, ExponentialModeMatchesClosedForm) {
    const auto p = LtcfParams::exponential(0.8);
    const Vec theta{0.6, 0.3, 0.1};
    const auto closed = sharing_rule(6.0, theta, p);
    const auto oracle = static_oracle(6.0, theta, p);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(oracle.shares[i], closed.shares[i], 1e-8);
    EXPECT_NEAR(sum(closed.shares), 6.0, 1e-12);
}

TEST(StaticOracle, BracketFailureBelowGroupFloor) {
    EXPECT_THROW(static_oracle(0.1, Vec{0.5, 0.5}, LtcfParams::make(2, 1, -0.1)), SolverError);
}

TEST(AggregateUtility, Example) {
    const auto p = LtcfParams::make(2, 1, 0);
    const Vec theta{0.5, 0.5};
    EXPECT_NEAR(aggregate_utility(2.0, theta, p), -2.0, 1e-14);
    EXPECT_NEAR(0.5 * ltcf_utility(1.0, p) + 0.5 * ltcf_utility(1.0, p), -2.0, 1e-14);
}

TEST(AggregateUtility, EqualsWeightedUtilityAtOptimalShares) {
    testing::Sampler s(36);
    for (int k = 0; k < 300; ++k) {
        const std::size_t n = static_cast<std::size_t>(s.integer(1, 5));
        const auto p = LtcfParams::make(s.uniform(0.3, 5), s.uniform(0.5, 2), s.uniform(0, 1));
        const Vec theta = s.simplex(n, 0.05);
        const double x = testing::interior_threshold(theta, p) + s.uniform(0.5, 8);
        const auto shares = static_oracle(x, theta, p).shares;
        double direct = 0.0;
        for (std::size_t i = 0; i < n; ++i) direct += theta[i] * ltcf_utility(shares[i], p);
        EXPECT_NEAR(aggregate_utility(x, theta, p), direct, 1e-8 * std::max(1.0, std::abs(direct)));
    }
}

TEST(AggregateUtility, SingleAgentReducesToUtility) {
    for (double g : {0.5, 1.0, 2.0}) {
        const auto p = LtcfParams::make(g, 1.1, 0.2);
        EXPECT_NEAR(aggregate_utility(3.0, Vec{1.0}, p), ltcf_utility(3.0, p), 1e-14);
    }
}

TEST(AggregateUtility, HomogeneousOfDegreeOneInWeights) {
    testing::Sampler s(37);
    for (int k = 0; k < 100; ++k) {
        const auto p = LtcfParams::make(s.uniform(0.3, 4), 1, s.uniform(0, 1));
        const Vec theta = s.simplex(3, 0.05);
        const double x = s.uniform(0.5, 5);
        const double u = aggregate_utility(x, theta, p);
        for (double xi : {0.5, 2.0}) {
            Vec scaled = theta;
            for (double& v : scaled) v *= xi;
            EXPECT_NEAR(aggregate_utility(x, scaled, p), xi * u, 1e-12 * std::max(1.0, std::abs(u)));
        }
    }
}

TEST(AggregateUtility, EnvelopeIdentity) {
    testing::Sampler s(38);
    for (int k = 0; k < 100; ++k) {
        const auto p = LtcfParams::make(s.uniform(0.3, 4), 1, s.uniform(0, 1));
        const Vec theta = s.simplex(3, 0.1);
        const double x = testing::interior_threshold(theta, p) + s.uniform(0.5, 5);
        const auto shares = sharing_rule(x, theta, p).shares;
        for (std::size_t i = 0; i < 3; ++i) {
            const double h = 1e-6;
            Vec up = theta;
            Vec dn = theta;
            up[i] += h;
            dn[i] -= h;
            const double fd = (aggregate_utility(x, up, p) - aggregate_utility(x, dn, p)) / (2 * h);
            EXPECT_NEAR(fd, ltcf_utility(shares[i], p), 1e-6);
        }
    }
}

TEST(AggregateUtility, IncreasingAndConcaveInConsumption) {
    testing::Sampler s(39);
    for (int k = 0; k < 200; ++k) {
        const auto p = LtcfParams::make(s.uniform(0.3, 4), s.uniform(0.5, 2), s.uniform(0, 1));
        const Vec theta = s.simplex(3, 0.05);
        const double x = s.uniform(0.5, 5);
        const double h = 1e-4;
        const double lo = aggregate_utility(x - h, theta, p);
        const double mid = aggregate_utility(x, theta, p);
        const double hi = aggregate_utility(x + h, theta, p);
        EXPECT_GT((hi - lo) / (2 * h), 0.0);
        EXPECT_LT(hi - 2 * mid + lo, 0.0);
        EXPECT_NEAR((hi - lo) / (2 * h), aggregate_marginal(x, theta, p), 1e-6 * aggregate_marginal(x, theta, p));
    }
}

TEST(ReducedUtility, Examples) {
    const auto p = LtcfParams::make(2, 1, 0);
    EXPECT_NEAR(reduced_utility_uhat(2.0, p, 2), 0.0, 1e-15);
    for (double g : {0.5, 1.0, 2.0}) {
        const auto q = LtcfParams::make(g, 1.2, 0.3);
        EXPECT_EQ(reduced_utility_uhat(1.7, q, 1), ltcf_utility(1.7, q));
    }
}

TEST(ReducedUtility, FactorizesAggregateUtility) {
    testing::Sampler s(40);
    for (int k = 0; k < 300; ++k) {
        const std::size_t n = static_cast<std::size_t>(s.integer(1, 5));
        double g = s.uniform(0.3, 4);
        if (std::abs(g - 1) < 1e-3) g = 1.5;
        const auto p = LtcfParams::make(g, s.uniform(0.5, 2), s.uniform(0, 1));
        const Vec theta = s.simplex(n, 0.05);
        const double x = s.uniform(0.5, 8);
        double ps = 0.0;
        for (double v : theta) ps += std::pow(v, 1 / g);
        const double c = g / (1 - g);
        const double expected = std::pow(ps, g) * (reduced_utility_uhat(x, p, n) + c) - c;
        EXPECT_NEAR(aggregate_utility(x, theta, p), expected, 1e-11 * std::max(1.0, std::abs(expected)));
    }
}

TEST(NonstationaryUtility, StartsAtAggregateAndConvergesToReduced) {
    const auto d = DiscountProfile::make({0.95, 0.85}, 2.0);
    const auto p = LtcfParams::make(2, 1, 0);
    const auto theta0 = WeightVector::from({0.5, 0.5});
    for (double x : {0.5, 1.0, 3.0}) {
        EXPECT_NEAR(nonstationary_utility(x, 0, theta0, d, p), aggregate_utility(x, theta0, p), 1e-15);
        EXPECT_NEAR(nonstationary_utility(x, 2000, theta0, d, p), reduced_utility_uhat(x, p, 2), 1e-8);
    }
}

TEST(NonstationaryUtility, MatchesDirectFormula) {
    const std::vector<double> delta{0.95, 0.85, 0.7};
    const std::vector<double> theta0{0.2, 0.5, 0.3};
    const double g = 3.0;
    const auto d = DiscountProfile::make(delta, g);
    const auto p = LtcfParams::make(g, 1.3, 0.4);
    for (long t : {0L, 1L, 7L, 40L}) {
        double num = 0.0;
        for (std::size_t i = 0; i < 3; ++i) num += std::pow(theta0[i] * std::pow(delta[i], double(t)), 1 / g);
        const double beta = testing::direct_beta(theta0, delta, t);
        const double x = 2.0;
        const double expected = g / (1 - g) * (std::pow(num, g) / beta * std::pow(0.4 * 3 + 1.3 / g * x, 1 - g) - 1);
        EXPECT_NEAR(nonstationary_utility(x, t, WeightVector::from(theta0), d, p), expected, 1e-12);
    }
}

// With symmetric initial weights the weights move monotonically away from the
// barycenter, so U_t rises toward its limit for every curvature.
TEST(NonstationaryUtility, IncreasingForSymmetricInitialWeights) {
    const auto theta0 = WeightVector::from({0.5, 0.5});
    for (double g : {0.5, 1.0, 2.0}) {
        const auto d = DiscountProfile::make({0.95, 0.85}, g);
        const auto p = LtcfParams::make(g, 1, 0);
        for (double x : {0.4, 1.0, 2.5}) {
            const double limit = reduced_utility_uhat(x, p, 2);
            double prev = nonstationary_utility(x, 0, theta0, d, p);
            for (long t = 1; t <= 150; ++t) {
                const double u = nonstationary_utility(x, t, theta0, d, p);
                EXPECT_GT(u, prev) << "g=" << g << " x=" << x << " t=" << t;
                EXPECT_LE(u, limit + 1e-14);
                prev = u;
            }
        }
    }
}

// With the patient agent initially underweighted the weights pass through the
// barycenter first, so U_t dips before rising: no monotone ordering holds.
TEST(NonstationaryUtility, NonMonotoneWhenPatientAgentStartsUnderweighted) {
    const auto theta0 = WeightVector::from({0.2, 0.8});
    for (double g : {0.5, 1.0, 2.0}) {
        const auto d = DiscountProfile::make({0.95, 0.85}, g);
        const auto p = LtcfParams::make(g, 1, 0);
        const double u0 = nonstationary_utility(1.0, 0, theta0, d, p);
        const double u1 = nonstationary_utility(1.0, 1, theta0, d, p);
        const double u60 = nonstationary_utility(1.0, 60, theta0, d, p);
        EXPECT_LT(u1, u0);
        EXPECT_GT(u60, u0);
    }
}

TEST(TcfAggregate, Example) {
    const auto out = tcf_aggregate(4.0, Vec{0.8, 0.2}, LtcfParams::make(2, 1, 0), 2);
    EXPECT_NEAR(out.alpha_hat, 2.0, 1e-15);
    EXPECT_NEAR(out.alpha_individual[0], 4.0 / 3, 1e-14);
    EXPECT_NEAR(out.alpha_individual[1], 2.0 / 3, 1e-14);
}

TEST(TcfAggregate, IndividualIndicesSumToAggregate) {
    testing::Sampler s(41);
    for (int k = 0; k < 300; ++k) {
        const std::size_t n = static_cast<std::size_t>(s.integer(1, 6));
        const auto p = LtcfParams::make(s.uniform(0.3, 5), s.uniform(0.5, 2), s.uniform(0, 1));
        const Vec theta = s.simplex(n, 0.05);
        const double x = testing::interior_threshold(theta, p) + s.uniform(0.5, 8);
        const auto out = tcf_aggregate(x, theta, p, n);
        EXPECT_NEAR(sum(out.alpha_individual), out.alpha_hat, 1e-12 * out.alpha_hat);
        const auto a = sharing_rule(x, theta, p).a_coeffs;
        for (std::size_t i = 0; i < n; ++i) {
            EXPECT_NEAR(out.alpha_individual[i], a[i] * out.alpha_hat, 1e-12 * out.alpha_hat);
        }
    }
}

}  // namespace
}  // namespace hetdisc
