// Acceptance suite. Each test prints one summary line:
//   [criterion N] PASS/FAIL - description (elapsed)
// Run via ctest (test name "acceptance") or directly.

#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <thread>
#include <vector>

#include "rennala/config.hpp"
#include "rennala/engine.hpp"
#include "rennala/sweep.hpp"
#include "rennala/theory.hpp"
#include "rennala/verify.hpp"

using namespace rennala;

namespace {

class Stopwatch {
  public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

  private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void report(int criterion, bool pass, const std::string& what, double elapsed) {
    std::printf("[criterion %d] %s - %s (%.1f s)\n", criterion, pass ? "PASS" : "FAIL",
                what.c_str(), elapsed);
    std::fflush(stdout);
}

}  // namespace

// 1. With p = 1 and the g^- side ignored, the pair method's x-iterates are
//    bit-identical to minibatch SGD under a shared per-arrival seed stream.
TEST(Acceptance, C1_PEqualsOneEquivalence) {
    Stopwatch watch;
    RandomStream rng(101);
    bool pass = true;
    int configs_checked = 0;
    for (int c = 0; c < 50; ++c) {
        const int d = 1 + static_cast<int>(rng.next_below(100));
        const int n = 1 + static_cast<int>(rng.next_below(10));
        std::vector<double> taus(static_cast<std::size_t>(n));
        for (auto& t : taus) t = rng.next_uniform(0.5, 10.0);
        const DelayProfile profile(taus);
        const QuadraticProblem problem(d, 0.1);
        const std::uint64_t run_seed = rng.next_u64();

        MethodConfig mc;
        mc.gamma = rng.next_uniform(0.0, 0.5);
        mc.B = static_cast<std::int64_t>(1 + rng.next_below(8));
        mc.B0 = mc.B;  // aligns the shared seed stream round-for-round
        mc.p = 1.0;

        auto capture = [&](Method method) {
            std::vector<std::vector<double>> iterates;
            MethodConfig m = mc;
            m.method = method;
            run_method(problem, m, profile, std::numeric_limits<double>::infinity(), 1, run_seed,
                       20, {},
                       [&](std::int64_t, double, std::span<const double> x) {
                           iterates.emplace_back(x.begin(), x.end());
                       });
            return iterates;
        };
        const auto xs_mvr = capture(Method::RennalaMvr);
        const auto xs_sgd = capture(Method::RennalaSgd);
        if (xs_mvr.size() != xs_sgd.size()) {
            pass = false;
            continue;
        }
        for (std::size_t k = 0; k < xs_mvr.size(); ++k) {
            if (xs_mvr[k] != xs_sgd[k]) pass = false;  // exact vector equality
        }
        ++configs_checked;
    }
    const double elapsed = watch.seconds();
    report(1, pass && configs_checked == 50,
           "p=1 pair method bit-identical to minibatch SGD on 50 random configs", elapsed);
    EXPECT_TRUE(pass);
    EXPECT_EQ(configs_checked, 50);
    EXPECT_LE(elapsed, 10.0);
}

// 2. Collection-time lemma over 1000 random profiles: restart-mode finish
//    <= T(b) and worst-case-offset finish <= 2 T(b), exact comparisons.
TEST(Acceptance, C2_CollectionTimeLemma) {
    Stopwatch watch;
    RandomStream rng(202);
    bool pass = true;
    double worst_restart = 0.0, worst_offset = 0.0;
    for (int t = 0; t < 1000; ++t) {
        const int n = 1 + static_cast<int>(rng.next_below(32));
        std::vector<double> taus(static_cast<std::size_t>(n));
        for (auto& tau : taus) tau = rng.next_uniform(0.1, 100.0);
        const DelayProfile profile(taus);
        const auto b = static_cast<std::int64_t>(1 + rng.next_below(500));
        const double start = rng.next_uniform(0.0, 100.0);
        const double tb = theory::t_of_b(profile, b).value;

        const double fr = collect_batch(profile, b, PayloadKind::Single, start, true).finish - start;
        const double fo = collect_batch(profile, b, PayloadKind::Single, start, false).finish - start;
        worst_restart = std::max(worst_restart, fr / tb);
        worst_offset = std::max(worst_offset, fo / (2.0 * tb));
        if (fr > tb || fo > 2.0 * tb) pass = false;
    }
    const double elapsed = watch.seconds();
    char msg[160];
    std::snprintf(msg, sizeof(msg),
                  "collection within T(b) and 2T(b) on 1000 profiles (worst ratios %.4f, %.4f)",
                  worst_restart, worst_offset);
    report(2, pass, msg, elapsed);
    EXPECT_TRUE(pass);
    EXPECT_LE(elapsed, 30.0);
}

// 3. Oracle counters equal B0 + 2KB (pair method) and KB (SGD) exactly.
TEST(Acceptance, C3_OracleCountExactness) {
    Stopwatch watch;
    const auto checks = verify::verify_engine(50, 303);
    bool pass = true;
    for (const auto& c : checks) {
        if (c.name.rfind("oracle_count", 0) == 0 && !c.pass) pass = false;
    }
    const double elapsed = watch.seconds();
    report(3, pass, "engine counters match B0 + 2KB and KB on 100 random configs", elapsed);
    EXPECT_TRUE(pass);
}

// 4. Desk-scale closed-form parameter check: with the selector's parameters
//    at eps chosen so K <= 5000, the running mean of ||grad f(x^k)||^2 over
//    K rounds stays below eps (2x safety), averaged over 10 seeds.
TEST(Acceptance, C4_Theorem3DeskScale) {
    Stopwatch watch;
    const QuadraticProblem problem(10, 0.01);
    const double sigma = problem.total_sigma();       // sqrt(10) * 0.01
    const double l_bar = problem.smoothness_constant();

    // Start close enough to the minimizer that the round budget fits: the
    // gap is exactly 1/2 t^2 A_11 = 0.1 for t = sqrt(0.4).
    auto x0 = problem.minimizer();
    x0[0] += std::sqrt(0.4);
    const double delta = problem.value(x0) - problem.min_value();

    const double eps = 5e-4;
    const auto params = theorem3_params(eps, sigma, delta, l_bar);
    ASSERT_EQ(params.regime, Theorem3Regime::Ok);
    ASSERT_LE(params.K, 5000);

    MethodConfig mc;
    mc.method = Method::RennalaMvr;
    mc.gamma = params.gamma;
    mc.p = params.p;
    mc.B = params.B;
    mc.B0 = params.B0;

    DelaySpec spec;
    spec.kind = DelayKind::Sqrt;
    const DelayProfile profile = sample_delays(spec, 4, 404);

    double sum_over_seeds = 0.0;
    for (int seed = 0; seed < 10; ++seed) {
        double running = 0.0;
        std::int64_t counted = 0;
        run_method(problem, mc, profile, std::numeric_limits<double>::infinity(), params.K,
                   derive_key(404, static_cast<std::uint64_t>(seed)), params.K, x0,
                   [&](std::int64_t k, double, std::span<const double> x) {
                       if (k < params.K) {  // iterates x^0 .. x^{K-1}
                           running += grad_sq_norm(problem, x);
                           ++counted;
                       }
                   });
        EXPECT_EQ(counted, params.K);
        sum_over_seeds += running / static_cast<double>(params.K);
    }
    const double mean = sum_over_seeds / 10.0;
    const bool pass = mean <= 2.0 * eps;
    const double elapsed = watch.seconds();
    char msg[200];
    std::snprintf(msg, sizeof(msg),
                  "running mean %.3g <= 2 eps = %.3g (K=%lld, B=%lld, B0=%lld, p=%.4f)", mean,
                  2.0 * eps, static_cast<long long>(params.K), static_cast<long long>(params.B),
                  static_cast<long long>(params.B0), params.p);
    report(4, pass, msg, elapsed);
    EXPECT_TRUE(pass);
    EXPECT_LE(elapsed, 300.0);
}

// 5. Desk-scale reproduction of the quadratic benchmark comparison: for all
//    three delay models the best variance-reduced configuration ends at or
//    below the best SGD configuration in the final-1% median metric.
TEST(Acceptance, C5_QualitativeBenchmark) {
    Stopwatch watch;
    ExperimentConfig cfg;
    cfg.problem = ProblemSpec{"quadratic", 100, 0.1, "total"};
    cfg.workers = 10;
    cfg.budget = 1e5;
    cfg.record_stride = 1;
    cfg.seeds = {1, 2, 3, 4, 5};
    cfg.metric = "grad_sq_norm";
    cfg.max_configs = 10000;

    MethodGrid sgd;
    sgd.method = Method::RennalaSgd;
    sgd.gamma = {0.03125, 0.0625, 0.125, 0.25, 0.5, 1.0};
    sgd.B = {1, 10, 40, 100};
    MethodGrid mvr = sgd;
    mvr.method = Method::RennalaMvr;
    mvr.p = {0.005, 0.05, 0.2, 0.9};
    mvr.B0 = {B0Choice{B0Choice::Kind::EqualB, 1}, B0Choice{B0Choice::Kind::BSquared, 1}};
    cfg.methods = {sgd, mvr};

    const int jobs = std::max(1u, std::thread::hardware_concurrency());
    bool pass = true;
    for (auto kind : {DelayKind::Sqrt, DelayKind::Uniform, DelayKind::Mixture}) {
        cfg.delay.kind = kind;
        const auto result = run_sweep(cfg, 2026, jobs);
        const auto best_sgd = top_entries(result, Method::RennalaSgd, 1);
        const auto best_mvr = top_entries(result, Method::RennalaMvr, 1);
        ASSERT_EQ(best_sgd.size(), 1u);
        ASSERT_EQ(best_mvr.size(), 1u);
        const double vs = result.entries[best_sgd[0]].aggregate;
        const double vm = result.entries[best_mvr[0]].aggregate;
        std::printf("  %s delays: best sgd %.4g (%s), best mvr %.4g (%s)\n", to_string(kind), vs,
                    config_label(result.entries[best_sgd[0]]).c_str(), vm,
                    config_label(result.entries[best_mvr[0]]).c_str());
        std::fflush(stdout);
        if (!(vm <= vs)) pass = false;
    }
    const double elapsed = watch.seconds();
    report(5, pass, "best variance-reduced config at or below best SGD for all delay models",
           elapsed);
    EXPECT_TRUE(pass);
    EXPECT_LE(elapsed, 1200.0);
}

// 6. Hardness suite at T in {5, 20, 50} and p in {0.05, 0.2, 1}.
TEST(Acceptance, C6_HardnessSuite) {
    Stopwatch watch;
    const auto checks = verify::verify_hardness({5, 20, 50}, {0.05, 0.2, 1.0}, 10000, 606);
    bool pass = true;
    for (const auto& c : checks) {
        if (!c.pass) {
            pass = false;
            std::printf("  failed: %s measured=%.6g bound=%.6g\n", c.name.c_str(), c.measured,
                        c.bound);
        }
    }
    const double elapsed = watch.seconds();
    char msg[120];
    std::snprintf(msg, sizeof(msg), "chain and estimator lemma suite, %zu checks", checks.size());
    report(6, pass, msg, elapsed);
    EXPECT_TRUE(pass);
    EXPECT_LE(elapsed, 180.0);
}

// 7. Universal-model reduction: constant rates 1/tau_i reproduce the
//    engine's round boundaries exactly on 100 random configs.
TEST(Acceptance, C7_UniversalModelReduction) {
    Stopwatch watch;
    RandomStream rng(707);
    bool pass = true;
    for (int t = 0; t < 100; ++t) {
        const int n = 1 + static_cast<int>(rng.next_below(6));
        std::vector<double> taus(static_cast<std::size_t>(n));
        std::vector<RateFunction> rates;
        for (auto& tau : taus) {
            tau = std::ldexp(1.0, static_cast<int>(rng.next_below(10)) - 3);
            rates.push_back(RateFunction::constant(1.0 / tau));
        }
        const DelayProfile profile(taus);
        const auto B0 = static_cast<std::int64_t>(1 + rng.next_below(50));
        const auto B = static_cast<std::int64_t>(1 + rng.next_below(25));
        const auto K = static_cast<std::int64_t>(rng.next_below(12));
        const auto times = theory::universal_completion_times(rates, B0, B, K);
        double boundary = collect_batch(profile, B0, PayloadKind::Single, 0.0, true).finish;
        if (boundary != times[0]) pass = false;
        for (std::int64_t k = 1; k <= K; ++k) {
            boundary = collect_batch(profile, B, PayloadKind::Pair, boundary, true).finish;
            if (boundary != times[static_cast<std::size_t>(k)]) pass = false;
        }
    }
    const double elapsed = watch.seconds();
    report(7, pass, "completion-time recursions equal engine boundaries on 100 configs", elapsed);
    EXPECT_TRUE(pass);
}

// 8. Closed-form plug-in values: T(B) worked examples to 1e-12 relative and
//    the three time-bound examples exactly.
TEST(Acceptance, C8_TheoryPlugIns) {
    Stopwatch watch;
    bool pass = true;

    const DelayProfile p124({1.0, 2.0, 4.0});
    const auto r = theory::t_of_b(p124, 10);
    if (std::abs(r.value - 52.0 / 7.0) > 1e-12 * (52.0 / 7.0) || r.argmin_m != 3) pass = false;

    const DelayProfile homo(std::vector<double>(8, 0.75));
    if (std::abs(theory::t_of_b(homo, 8).value - 1.5) > 1e-12 * 1.5) pass = false;

    const DelayProfile one({1.0});
    if (theory::mvr_time_bound(0.01, 1.0, 1.0, 1.0, one) != 589242.0) pass = false;
    if (theory::sgd_time_bound(0.01, 1.0, 1.0, 1.0, one) != 242400.0) pass = false;
    if (theory::lower_time_bound(0.01, 1.0, 1.0, 1.0, one) != 1111.0) pass = false;

    const double elapsed = watch.seconds();
    report(8, pass, "T(B) worked examples and time-bound plug-ins reproduce stated values",
           elapsed);
    EXPECT_TRUE(pass);
}
