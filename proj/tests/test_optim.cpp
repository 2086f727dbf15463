#include "rennala/optim.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "rennala/problems.hpp"

using namespace rennala;

namespace {

MvrState scalar_state(double x, double g, double gamma, double p, std::int64_t B = 1,
                      double alpha = 1.0) {
    MvrState s;
    s.x = {x};
    s.g = {g};
    s.gamma = gamma;
    s.p = p;
    s.B = B;
    s.B0 = 1;
    s.alpha = alpha;
    return s;
}

Minibatch scalar_batch(double plus, double minus, std::int64_t count = 1) {
    Minibatch b;
    b.g_plus = {plus};
    b.g_minus = {minus};
    b.count = count;
    return b;
}

}  // namespace

TEST(MvrStep, ScalarWorkedExample) {
    // g' = g_plus + (1-p)(g - g_minus) = 2 + 0.5 (4 - 3) = 2.5
    const auto s = scalar_state(0.0, 4.0, 0.0, 0.5);
    const auto next = mvr_step(s, scalar_batch(2.0, 3.0));
    EXPECT_DOUBLE_EQ(next.g[0], 2.5);
    EXPECT_EQ(next.k, 1);
    EXPECT_EQ(next.oracle_calls, 2);
}

TEST(MvrStep, PIsOneIgnoresHistory) {
    const auto s = scalar_state(1.0, 123.0, 0.1, 1.0);
    const auto next = mvr_step(s, scalar_batch(2.0, -77.0));
    EXPECT_EQ(next.g[0], 2.0);
}

TEST(MvrStep, CorrectionCancelsWhenGMinusEqualsG) {
    const auto s = scalar_state(0.0, 4.0, 0.0, 0.25);
    const auto next = mvr_step(s, scalar_batch(2.0, 4.0));
    EXPECT_EQ(next.g[0], 2.0);
}

TEST(MvrStep, StepPrecedesEstimatorUpdate) {
    // A NaN batch must not leak into the new iterate: x' depends on g only.
    const auto s = scalar_state(1.0, 2.0, 0.5, 0.5);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const auto next = mvr_step(s, scalar_batch(nan, nan));
    EXPECT_DOUBLE_EQ(next.x[0], 0.0);  // 1 - 0.5 * 2
    EXPECT_TRUE(std::isnan(next.g[0]));
}

TEST(MvrStep, Validation) {
    const auto s = scalar_state(0.0, 1.0, 0.1, 0.5, 4);
    EXPECT_THROW(mvr_step(s, scalar_batch(1.0, 1.0, 3)), std::invalid_argument);  // count != B
    Minibatch no_minus;
    no_minus.g_plus = {1.0};
    no_minus.count = 4;
    EXPECT_THROW(mvr_step(s, no_minus), std::invalid_argument);
    auto bad = s;
    bad.x = {std::numeric_limits<double>::infinity()};
    EXPECT_THROW(mvr_step(bad, scalar_batch(1.0, 1.0, 4)), std::invalid_argument);
}

TEST(SgdStep, ZeroStepKeepsIterate) {
    auto s = scalar_state(3.0, 0.0, 0.0, 1.0);
    Minibatch b;
    b.g_plus = {17.0};
    b.count = 1;
    const auto next = sgd_step(s, b);
    EXPECT_EQ(next.x[0], 3.0);
    EXPECT_EQ(next.oracle_calls, 1);
}

TEST(SgdStep, NoiselessQuadraticIsGradientDescent) {
    const QuadraticProblem problem(10, 0.0);
    MvrState s;
    s.x = problem.start_point();
    s.g.assign(10, 0.0);
    s.gamma = 0.25;
    s.B = 1;
    std::vector<double> g(10);
    problem.exact_grad(s.x, g);
    Minibatch b;
    b.g_plus = g;
    b.count = 1;
    const auto next = sgd_step(s, b);
    for (int i = 0; i < 10; ++i) {
        EXPECT_DOUBLE_EQ(next.x[static_cast<std::size_t>(i)],
                         s.x[static_cast<std::size_t>(i)] - 0.25 * g[static_cast<std::size_t>(i)]);
    }
}

TEST(SgdStep, RejectsGMinus) {
    const auto s = scalar_state(0.0, 0.0, 0.1, 1.0);
    EXPECT_THROW(sgd_step(s, scalar_batch(1.0, 1.0)), std::invalid_argument);
}

TEST(PEqualsOneEquivalence, SharedGPlusStreamGivesIdenticalIterates) {
    // Same g_plus sequence consumed by both update rules: bit-identical x.
    RandomStream rng(31);
    auto mvr = scalar_state(1.5, 0.0, 0.125, 1.0);
    auto sgd = scalar_state(1.5, 0.0, 0.125, 1.0);
    // Seed the pair method's estimator with the first batch, as the
    // initialization phase does.
    const double g0 = rng.next_gaussian();
    mvr.g = {g0};
    double pending = g0;  // sgd consumes the same stream one step later
    for (int k = 0; k < 30; ++k) {
        Minibatch sb;
        sb.g_plus = {pending};
        sb.count = 1;
        sgd = sgd_step(sgd, sb);

        const double fresh = rng.next_gaussian();
        mvr = mvr_step(mvr, scalar_batch(fresh, 12345.0));  // g_minus ignored at p = 1
        pending = fresh;

        ASSERT_EQ(mvr.x[0], sgd.x[0]) << "round " << k;
    }
}

TEST(InexactStep, ScalarWorkedExample) {
    // g' = 0.9 * 1 + 0.1 * 2 + 0.01 * 0.9 * (2 - 0) = 1.118
    const auto s = scalar_state(0.0, 1.0, 0.0, 0.1, 1, 0.01);
    const double gnew = 2.0, gold = 0.0;
    const auto next = inexact_mvr_step(s, std::vector<double>{gnew}, std::vector<double>{gold});
    EXPECT_NEAR(next.g[0], 1.118, 1e-12);
    EXPECT_EQ(next.oracle_calls, 1);
}

TEST(InexactStep, CorrectionCancelsOnEqualGradients) {
    const auto s = scalar_state(0.0, 1.0, 0.0, 0.3, 1, 0.02);
    const auto next = inexact_mvr_step(s, std::vector<double>{5.0}, std::vector<double>{5.0});
    EXPECT_DOUBLE_EQ(next.g[0], (1.0 - 0.3) * 1.0 + 0.3 * 5.0);
}

TEST(InexactStep, AlphaZeroWithPOneIsPlainSgdEstimator) {
    auto s = scalar_state(0.0, 9.0, 0.0, 1.0, 1, 1.0);
    s.alpha = 0.0;  // correction disabled entirely
    const auto next = inexact_mvr_step(s, std::vector<double>{2.0}, std::vector<double>{7.0});
    EXPECT_EQ(next.g[0], 2.0);
}

TEST(InexactStep, MissingCacheThrows) {
    const auto s = scalar_state(0.0, 1.0, 0.0, 0.5);
    EXPECT_THROW(inexact_mvr_step(s, std::vector<double>{1.0}, std::vector<double>{}),
                 std::invalid_argument);
}

TEST(InexactStep, AlphaOneWithFreshOldGradientReproducesExactStep) {
    // Dyadic values: both arithmetic paths are exact, equality is bitwise.
    const auto s = scalar_state(2.0, 4.0, 0.25, 0.5, 1, 1.0);
    const auto exact = mvr_step(s, scalar_batch(2.0, 3.0));
    const auto inexact = inexact_mvr_step(s, std::vector<double>{2.0}, std::vector<double>{3.0});
    EXPECT_EQ(exact.g[0], inexact.g[0]);
    EXPECT_EQ(exact.x[0], inexact.x[0]);

    // Random values: identical up to roundoff of the two expression orders.
    RandomStream rng(8);
    for (int t = 0; t < 100; ++t) {
        const auto st = scalar_state(rng.next_gaussian(), rng.next_gaussian(), 0.1,
                                     rng.next_unit(), 1, 1.0);
        const double gp = rng.next_gaussian(), gm = rng.next_gaussian();
        const auto a = mvr_step(st, scalar_batch(gp, gm));
        const auto b = inexact_mvr_step(st, std::vector<double>{gp}, std::vector<double>{gm});
        EXPECT_NEAR(a.g[0], b.g[0], 1e-13 * (1.0 + std::abs(a.g[0])));
    }
}

TEST(Theorem3, WorkedExample) {
    const auto r = theorem3_params(0.01, 1.0, 1.0, 1.0);
    EXPECT_EQ(r.regime, Theorem3Regime::Ok);
    EXPECT_DOUBLE_EQ(r.gamma, 0.25);
    EXPECT_DOUBLE_EQ(r.p, 0.1);
    EXPECT_EQ(r.B, 60);
    EXPECT_EQ(r.B0, 600);
    EXPECT_EQ(r.K, 2410);
}

TEST(Theorem3, SecondWorkedExample) {
    const auto r = theorem3_params(0.04, 1.0, 1.0, 1.0);
    EXPECT_DOUBLE_EQ(r.p, 0.2);
    EXPECT_EQ(r.B, 30);
    EXPECT_EQ(r.B0, 150);
}

TEST(Theorem3, LowNoiseFallback) {
    const auto r = theorem3_params(1.5, 1.0, 10.0, 1.0);  // sigma^2 = 1 <= eps
    EXPECT_EQ(r.regime, Theorem3Regime::LowNoise);
    EXPECT_DOUBLE_EQ(r.p, 1.0);
}

TEST(Theorem3, AlreadyStationary) {
    const auto r = theorem3_params(0.5, 10.0, 0.1, 1.0);  // 2 L delta = 0.2 <= eps
    EXPECT_EQ(r.regime, Theorem3Regime::AlreadyStationary);
    EXPECT_EQ(r.K, 0);
}

TEST(Theorem3, InvalidInputs) {
    EXPECT_THROW(theorem3_params(0.0, 1.0, 1.0, 1.0), std::invalid_argument);
    EXPECT_THROW(theorem3_params(0.1, 1.0, -1.0, 1.0), std::invalid_argument);
    EXPECT_THROW(theorem3_params(0.1, 1.0, 1.0, 0.0), std::invalid_argument);
}

TEST(MvrInit, NoiselessSingleSample) {
    const QuadraticProblem problem(6, 0.0);
    const auto x0 = problem.start_point();
    const auto s = mvr_init(problem, x0, 1, 5);
    std::vector<double> g(6);
    problem.exact_grad(x0, g);
    EXPECT_EQ(s.g, g);
    EXPECT_EQ(s.oracle_calls, 1);
}

TEST(MvrInit, MonteCarloVariance) {
    // ||g - grad f(x0)||^2 concentrates around d sigma^2 / B0.
    const QuadraticProblem problem(100, 0.1);
    const auto x0 = problem.start_point();
    const std::int64_t B0 = 10000;
    const auto s = mvr_init(problem, x0, B0, 77);
    std::vector<double> g(100);
    problem.exact_grad(x0, g);
    double err = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) err += (s.g[i] - g[i]) * (s.g[i] - g[i]);
    const double expected = 100 * 0.01 / static_cast<double>(B0);
    const double sd = std::sqrt(2.0 * 100.0) * 0.01 / static_cast<double>(B0);
    EXPECT_NEAR(err, expected, 4.0 * sd);
    EXPECT_EQ(s.oracle_calls, B0);
}

TEST(MeanAccumulator, CompensatedMeanIsAccurate) {
    // 1e5 copies of ill-scaled values still average exactly.
    MeanAccumulator acc(2);
    for (int i = 0; i < 100000; ++i) {
        acc.add(std::vector<double>{1e16, 1.0});
        acc.add(std::vector<double>{-1e16, -1.0});
        acc.add(std::vector<double>{3.0, 0.25});
    }
    const auto m = acc.mean();
    EXPECT_DOUBLE_EQ(m[0], 1.0);
    EXPECT_DOUBLE_EQ(m[1], 0.25 / 3.0);
}
