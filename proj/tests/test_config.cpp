#include "rennala/config.hpp"

#include <gtest/gtest.h>

using namespace rennala;

namespace {

const char* kFullConfig = R"(# quadratic benchmark, desk scale
problem = { kind = "quadratic", dim = 100, sigma_add = 0.1 }
delay = { kind = "mixture", permute = true, peaks = 3, stddev = 10.0 }
workers = 10
budget = 1e5
record_stride = 1
seeds = [1, 2, 3, 4, 5]
out_dir = "results"
metric = "grad_sq_norm"
max_configs = 5000

[method.rennala_sgd]
gamma = [0.03125, 0.125, 0.5]
B = [1, 10, 100]

[method.rennala_mvr]
gamma = [0.125, 0.5]
B = [10, 40]
p = [0.01, 0.2]
B0 = ["B", "B^2"]

[method.rennala_mvr_inexact]
gamma = [0.25]
B = [10]
p = [0.1]
alpha = [0.01, 0.025]
B0 = [100]
)";

}  // namespace

TEST(ConfigParser, ScalarsAndTables) {
    const auto root = parse_config("a = 1.5\nb = true\nc = \"hi\"\nt = { x = 2, y = [1, 2, 3] }\n");
    EXPECT_DOUBLE_EQ(root.find("a")->as_number(), 1.5);
    EXPECT_TRUE(root.find("b")->as_bool());
    EXPECT_EQ(root.find("c")->as_string(), "hi");
    const auto* t = root.find("t");
    ASSERT_NE(t, nullptr);
    EXPECT_EQ(t->find("x")->as_int(), 2);
    EXPECT_EQ(t->find("y")->as_array().size(), 3u);
}

TEST(ConfigParser, SectionsNest) {
    const auto root = parse_config("[method.rennala_sgd]\ngamma = [0.5]\n[method.rennala_mvr]\np = [0.1]\n");
    const auto* m = root.find("method");
    ASSERT_NE(m, nullptr);
    ASSERT_NE(m->find("rennala_sgd"), nullptr);
    ASSERT_NE(m->find("rennala_mvr"), nullptr);
    EXPECT_DOUBLE_EQ(m->find("rennala_sgd")->find("gamma")->as_array()[0].as_number(), 0.5);
}

TEST(ConfigParser, LinePreciseErrors) {
    try {
        parse_config("a = 1\nb = [1, 2\nc = 3\n");
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.line(), 2);
    }
    try {
        parse_config("a = 1\n\n\nnonsense here\n");
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.line(), 4);
    }
    try {
        parse_config("x = oops\n");
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.line(), 1);
        EXPECT_NE(std::string(e.what()).find("oops"), std::string::npos);
    }
}

TEST(ConfigParser, CommentsAndBlankLines) {
    const auto root = parse_config("# header\n\na = 2  # trailing comment\n");
    EXPECT_EQ(root.find("a")->as_int(), 2);
}

TEST(ExperimentConfig, FullRoundTrip) {
    const auto cfg = parse_experiment_config(kFullConfig);
    EXPECT_EQ(cfg.problem.kind, "quadratic");
    EXPECT_EQ(cfg.problem.dim, 100);
    EXPECT_DOUBLE_EQ(cfg.problem.sigma_add, 0.1);
    EXPECT_EQ(cfg.delay.kind, DelayKind::Mixture);
    EXPECT_EQ(cfg.delay.peaks, 3);
    EXPECT_DOUBLE_EQ(cfg.delay.stddev, 10.0);
    EXPECT_EQ(cfg.workers, 10);
    EXPECT_DOUBLE_EQ(cfg.budget, 1e5);
    EXPECT_EQ(cfg.seeds.size(), 5u);
    EXPECT_EQ(cfg.out_dir, "results");
    ASSERT_EQ(cfg.methods.size(), 3u);

    for (const auto& g : cfg.methods) {
        switch (g.method) {
            case Method::RennalaSgd:
                EXPECT_EQ(g.gamma.size(), 3u);
                EXPECT_EQ(g.B.size(), 3u);
                break;
            case Method::RennalaMvr: {
                ASSERT_EQ(g.B0.size(), 2u);
                EXPECT_EQ(g.B0[0].kind, B0Choice::Kind::EqualB);
                EXPECT_EQ(g.B0[1].kind, B0Choice::Kind::BSquared);
                EXPECT_EQ(g.B0[0].resolve(40), 40);
                EXPECT_EQ(g.B0[1].resolve(40), 1600);
                break;
            }
            case Method::RennalaMvrInexact:
                ASSERT_EQ(g.B0.size(), 1u);
                EXPECT_EQ(g.B0[0].kind, B0Choice::Kind::Literal);
                EXPECT_EQ(g.B0[0].resolve(10), 100);
                EXPECT_EQ(g.alpha.size(), 2u);
                break;
        }
    }
}

TEST(ExperimentConfig, Validation) {
    EXPECT_THROW(parse_experiment_config("workers = 0\n"), std::invalid_argument);
    EXPECT_THROW(parse_experiment_config("budget = -1\n"), std::invalid_argument);
    EXPECT_THROW(parse_experiment_config("seeds = [1, 1]\n"), std::invalid_argument);
    EXPECT_THROW(parse_experiment_config("metric = \"loss\"\n"), std::invalid_argument);
    EXPECT_THROW(parse_experiment_config("[method.rennala_sgd]\ngamma = []\nB = [1]\n"),
                 std::invalid_argument);
    EXPECT_THROW(parse_experiment_config("[method.rennala_mvr]\ngamma = [0.1]\nB = [1]\np = [2.0]\n"),
                 std::invalid_argument);
    EXPECT_THROW(parse_experiment_config("[method.nope]\ngamma = [0.1]\nB = [1]\n"),
                 std::invalid_argument);
    EXPECT_THROW(parse_experiment_config("problem = { sigma_convention = \"weird\" }\n"),
                 std::invalid_argument);
}

TEST(ExperimentConfig, DefaultsApply) {
    const auto cfg = parse_experiment_config("");
    EXPECT_EQ(cfg.problem.kind, "quadratic");
    EXPECT_EQ(cfg.workers, 10);
    EXPECT_EQ(cfg.metric, "grad_sq_norm");
    EXPECT_EQ(cfg.problem.sigma_convention, "total");
    EXPECT_TRUE(cfg.methods.empty());
}
