// Experiment driver: single runs, hyperparameter sweeps, and the
// verification subcommands. See README.md for the config grammar.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rennala/config.hpp"
#include "rennala/engine.hpp"
#include "rennala/sweep.hpp"
#include "rennala/theory.hpp"
#include "rennala/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

rennala::ExperimentConfig load_config(const std::string& path) {
    return rennala::parse_experiment_config(read_file(path));
}

// --out flag beats RENNALA_OUT beats the config's out_dir.
std::string resolve_out_dir(const std::string& flag_value, const std::string& config_value) {
    if (!flag_value.empty()) return flag_value;
    if (const char* env = std::getenv("RENNALA_OUT"); env && *env) return env;
    return config_value.empty() ? "out" : config_value;
}

void ensure_dir(const std::string& dir) { fs::create_directories(dir); }

int emit_checks(const std::vector<rennala::verify::CheckResult>& checks, const std::string& out_dir,
                const std::string& suite, const std::string& csv_path = "") {
    ensure_dir(out_dir);
    std::ofstream jsonl(fs::path(out_dir) / "report.jsonl", std::ios::app);
    std::ofstream csv;
    if (!csv_path.empty()) {
        csv.open(csv_path);
        csv << "check,pass,measured,bound,detail\n";
    }
    std::size_t width = 4;
    for (const auto& c : checks) width = std::max(width, c.name.size());
    for (const auto& c : checks) {
        std::printf("%-*s  %s  measured=%-12.6g bound=%-12.6g %s\n", static_cast<int>(width),
                    c.name.c_str(), c.pass ? "PASS" : "FAIL", c.measured, c.bound,
                    c.detail.c_str());
        json j{{"suite", suite},
               {"check", c.name},
               {"pass", c.pass},
               {"measured", c.measured},
               {"bound", c.bound},
               {"detail", c.detail}};
        jsonl << j.dump() << "\n";
        if (csv.is_open()) {
            csv << c.name << "," << (c.pass ? 1 : 0) << "," << c.measured << "," << c.bound << ",\""
                << c.detail << "\"\n";
        }
    }
    const bool ok = rennala::verify::all_pass(checks);
    std::printf("%s: %s (%zu checks)\n", suite.c_str(), ok ? "all passed" : "FAILURES", checks.size());
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"discrete-event simulator and verification suite for asynchronous "
                 "variance-reduced optimization"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_flag;
    std::uint64_t master_seed = 1;
    int jobs = 0;

    // ---- run -------------------------------------------------------------
    auto* cmd_run = app.add_subcommand("run", "single run, writes a trace CSV");
    std::string run_method_name;
    std::size_t run_seed_index = 0;
    double flag_gamma = -1.0, flag_p = -1.0, flag_alpha = -1.0;
    std::int64_t flag_B = -1, flag_B0 = -1;
    cmd_run->add_option("--config", config_path, "config file")->required();
    cmd_run->add_option("--method", run_method_name, "method name (default: first configured)");
    cmd_run->add_option("--seed", master_seed, "master seed");
    cmd_run->add_option("--seed-index", run_seed_index, "index into the config's seed list");
    cmd_run->add_option("--jobs", jobs, "unused in run; accepted for symmetry");
    cmd_run->add_option("--out", out_flag, "output directory");
    cmd_run->add_option("--gamma", flag_gamma, "override step size");
    cmd_run->add_option("--B", flag_B, "override batch size");
    cmd_run->add_option("--B0", flag_B0, "override initialization batch size");
    cmd_run->add_option("--p", flag_p, "override momentum parameter");
    cmd_run->add_option("--alpha", flag_alpha, "override correction scale");

    // ---- sweep -----------------------------------------------------------
    auto* cmd_sweep = app.add_subcommand("sweep", "full grid sweep with leaderboard and plot");
    cmd_sweep->add_option("--config", config_path, "config file")->required();
    cmd_sweep->add_option("--seed", master_seed, "master seed");
    cmd_sweep->add_option("--jobs", jobs, "worker pool size (default: hardware)");
    cmd_sweep->add_option("--out", out_flag, "output directory");

    // ---- verify-theory ----------------------------------------------------
    auto* cmd_vt = app.add_subcommand("verify-theory", "closed-form formula checks + report");
    double vt_eps = 0.01, vt_sigma = 1.0, vt_delta = 1.0, vt_lbar = 1.0;
    cmd_vt->add_option("--config", config_path, "config file (profile source, optional)");
    cmd_vt->add_option("--seed", master_seed, "master seed");
    cmd_vt->add_option("--out", out_flag, "output directory");
    cmd_vt->add_option("--eps", vt_eps, "target accuracy for the report");
    cmd_vt->add_option("--sigma", vt_sigma, "noise bound for the report");
    cmd_vt->add_option("--delta", vt_delta, "initial gap for the report");
    cmd_vt->add_option("--lbar", vt_lbar, "mean-squared smoothness for the report");

    // ---- verify-hardness ---------------------------------------------------
    auto* cmd_vh = app.add_subcommand("verify-hardness", "chain-construction lemma suite");
    std::vector<int> vh_T{5, 20, 50};
    std::vector<double> vh_p{0.05, 0.2, 1.0};
    int vh_trials = 10000;
    std::string vh_csv;
    cmd_vh->add_option("--T", vh_T, "chain lengths");
    cmd_vh->add_option("--p", vh_p, "zero-chain probabilities");
    cmd_vh->add_option("--trials", vh_trials, "Monte-Carlo draws per point");
    cmd_vh->add_option("--seed", master_seed, "master seed");
    cmd_vh->add_option("--out", out_flag, "output directory");
    cmd_vh->add_option("--csv", vh_csv, "also write the pass/fail table as CSV");

    // ---- verify-engine ------------------------------------------------------
    auto* cmd_ve = app.add_subcommand("verify-engine", "collection-time and counter checks");
    int ve_trials = 1000;
    cmd_ve->add_option("--trials", ve_trials, "random collection cases");
    cmd_ve->add_option("--seed", master_seed, "master seed");
    cmd_ve->add_option("--out", out_flag, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_run->parsed()) {
            const auto cfg = load_config(config_path);
            const std::string out_dir = resolve_out_dir(out_flag, cfg.out_dir);
            ensure_dir(out_dir);
            if (cfg.methods.empty()) throw std::runtime_error("config has no methods");
            const rennala::MethodGrid* grid = &cfg.methods.front();
            if (!run_method_name.empty()) {
                const auto want = rennala::method_from_string(run_method_name);
                grid = nullptr;
                for (const auto& g : cfg.methods) {
                    if (g.method == want) grid = &g;
                }
                if (!grid) throw std::runtime_error("method not in config: " + run_method_name);
            }
            if (run_seed_index >= cfg.seeds.size()) {
                throw std::runtime_error("seed-index out of range");
            }

            rennala::MethodConfig mc;
            mc.method = grid->method;
            mc.gamma = flag_gamma >= 0 ? flag_gamma : grid->gamma.front();
            mc.B = flag_B >= 1 ? flag_B : grid->B.front();
            mc.p = flag_p > 0 ? flag_p : grid->p.front();
            if (mc.method == rennala::Method::RennalaSgd) mc.p = 1.0;
            mc.alpha = flag_alpha > 0 ? flag_alpha : grid->alpha.front();
            mc.B0 = flag_B0 >= 1 ? flag_B0 : grid->B0.front().resolve(mc.B);

            const auto problem = rennala::make_problem(cfg.problem);
            const auto profile = rennala::sample_delays(
                cfg.delay, cfg.workers, rennala::profile_seed(master_seed, run_seed_index));
            const auto run_seed =
                rennala::run_stream_seed(master_seed, mc.method, 0, run_seed_index);
            const auto trace = rennala::run_method(*problem, mc, profile, cfg.budget,
                                                   cfg.record_stride, run_seed);

            char name[128];
            std::snprintf(name, sizeof(name), "trace_%s_seed%zu.csv",
                          rennala::to_string(mc.method), run_seed_index);
            const fs::path path = fs::path(out_dir) / name;
            std::ofstream out(path);
            trace.to_csv(out);
            std::printf("wrote %s (%zu records, %lld rounds)\n", path.string().c_str(),
                        trace.records.size(),
                        static_cast<long long>(trace.records.back().iter));
            return 0;
        }

        if (cmd_sweep->parsed()) {
            const auto cfg = load_config(config_path);
            const std::string out_dir = resolve_out_dir(out_flag, cfg.out_dir);
            ensure_dir(out_dir);
            const auto result = rennala::run_sweep(cfg, master_seed, jobs);
            {
                std::ofstream out(fs::path(out_dir) / "leaderboard.csv");
                rennala::write_leaderboard_csv(out, result);
            }
            {
                std::ofstream out(fs::path(out_dir) / "plot.svg");
                rennala::write_top3_plot(out, cfg, result, master_seed);
            }
            std::printf("sweep: %zu configurations x %zu seeds\n", result.entries.size(),
                        cfg.seeds.size());
            for (const auto& grid : cfg.methods) {
                for (std::size_t idx : rennala::top_entries(result, grid.method)) {
                    const auto& e = result.entries[idx];
                    std::printf("  rank %-3d %-45s aggregate %.6g\n", e.rank,
                                rennala::config_label(e).c_str(), e.aggregate);
                }
            }
            std::printf("wrote %s and %s\n",
                        (fs::path(out_dir) / "leaderboard.csv").string().c_str(),
                        (fs::path(out_dir) / "plot.svg").string().c_str());
            return 0;
        }

        if (cmd_vt->parsed()) {
            const std::string out_dir = resolve_out_dir(out_flag, "out");
            auto checks = rennala::verify::verify_theory(master_seed);
            const int rc = emit_checks(checks, out_dir, "theory");

            rennala::DelayProfile profile({1.0});
            if (!config_path.empty()) {
                const auto cfg = load_config(config_path);
                profile = rennala::sample_delays(cfg.delay, cfg.workers,
                                                 rennala::profile_seed(master_seed, 0));
            }
            try {
                const auto rep =
                    rennala::theory::complexity_report(vt_eps, vt_sigma, vt_delta, vt_lbar, profile);
                rennala::theory::print_report(std::cout, rep);
                std::ofstream csv(fs::path(out_dir) / "theory_report.csv");
                rennala::theory::report_to_csv(csv, rep);
            } catch (const std::domain_error& e) {
                std::printf("report skipped: %s\n", e.what());
            }
            return rc;
        }

        if (cmd_vh->parsed()) {
            const std::string out_dir = resolve_out_dir(out_flag, "out");
            const auto checks =
                rennala::verify::verify_hardness(vh_T, vh_p, vh_trials, master_seed);
            return emit_checks(checks, out_dir, "hardness", vh_csv);
        }

        if (cmd_ve->parsed()) {
            const std::string out_dir = resolve_out_dir(out_flag, "out");
            const auto checks = rennala::verify::verify_engine(ve_trials, master_seed);
            return emit_checks(checks, out_dir, "engine");
        }
    } catch (const rennala::ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
