#pragma once

// Hyperparameter sweeps: Cartesian grid expansion, a deterministic worker
// pool, final-window aggregation, leaderboard output, and the top-3 plot.
//
// Seed derivation rules:
//   run stream     hash(master_seed, method_id, config_index, seed_index)
//   delay profile  hash(master_seed, seed_index) only,
// so every method and config faces the identical delay realization for a
// given seed index.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <fstream>
#include <memory>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "rennala/config.hpp"
#include "rennala/delay.hpp"
#include "rennala/engine.hpp"
#include "rennala/problems.hpp"
#include "rennala/svg.hpp"

namespace rennala {

inline std::unique_ptr<StochasticProblem> make_problem(const ProblemSpec& spec) {
    if (spec.kind == "quadratic") {
        return std::make_unique<QuadraticProblem>(spec.dim, spec.sigma_add);
    }
    throw std::invalid_argument("unknown problem kind: " + spec.kind);
}

inline std::uint64_t profile_seed(std::uint64_t master_seed, std::size_t seed_index) {
    return derive_key(master_seed, 0x70726f66696cULL, seed_index);  // "profil"
}

inline std::uint64_t run_stream_seed(std::uint64_t master_seed, Method method,
                                     std::size_t config_index, std::size_t seed_index) {
    return derive_key(master_seed, static_cast<std::uint64_t>(method) + 1, config_index,
                      seed_index);
}

// One fully resolved grid point.
struct ConfigPoint {
    MethodConfig method_config;
    std::size_t config_index = 0;  // index within the method's grid
};

inline std::vector<ConfigPoint> expand_grid(const MethodGrid& grid) {
    std::vector<ConfigPoint> out;
    std::size_t idx = 0;
    for (double gamma : grid.gamma) {
        for (std::int64_t B : grid.B) {
            for (double p : grid.p) {
                for (double alpha : grid.alpha) {
                    for (const auto& b0 : grid.B0) {
                        MethodConfig mc;
                        mc.method = grid.method;
                        mc.gamma = gamma;
                        mc.B = B;
                        mc.p = grid.method == Method::RennalaSgd ? 1.0 : p;
                        mc.alpha = alpha;
                        mc.B0 = b0.resolve(B);
                        out.push_back({mc, idx++});
                    }
                }
            }
        }
    }
    return out;
}

// Median of the metric over records in the final 1% of the horizon; the last
// record when that window is empty.
inline double final_window_aggregate(const RunTrace& trace, double budget,
                                     const std::string& metric) {
    const bool use_f = metric == "f_value";
    std::vector<double> window;
    for (const auto& r : trace.records) {
        if (r.time >= 0.99 * budget) window.push_back(use_f ? r.f_value : r.grad_sq_norm);
    }
    if (window.empty()) {
        const auto& last = trace.records.back();
        return use_f ? last.f_value : last.grad_sq_norm;
    }
    std::sort(window.begin(), window.end());
    const std::size_t n = window.size();
    return n % 2 == 1 ? window[n / 2] : 0.5 * (window[n / 2 - 1] + window[n / 2]);
}

struct SweepEntry {
    Method method = Method::RennalaSgd;
    ConfigPoint point;
    std::vector<double> per_seed;  // aggregate per seed index
    double aggregate = 0.0;        // mean over seeds
    int rank = 0;                  // 1-based, ascending aggregate, all methods pooled
};

struct SweepResult {
    std::vector<SweepEntry> entries;
    std::vector<std::size_t> ranking;  // entry indices sorted by aggregate
};

// Runs the full Cartesian grid for every configured method. Aggregation is
// keyed by (method, config, seed) slots, so the outcome does not depend on
// task scheduling order.
inline SweepResult run_sweep(const ExperimentConfig& cfg, std::uint64_t master_seed, int jobs) {
    if (cfg.methods.empty()) throw std::invalid_argument("run_sweep: no methods configured");
    if (jobs < 1) jobs = static_cast<int>(std::thread::hardware_concurrency());
    if (jobs < 1) jobs = 1;

    SweepResult result;
    for (const auto& grid : cfg.methods) {
        for (auto& point : expand_grid(grid)) {
            SweepEntry e;
            e.method = grid.method;
            e.point = point;
            e.per_seed.assign(cfg.seeds.size(), 0.0);
            result.entries.push_back(std::move(e));
        }
    }
    if (static_cast<std::int64_t>(result.entries.size()) > cfg.max_configs) {
        throw std::invalid_argument(
            "run_sweep: grid has " + std::to_string(result.entries.size()) +
            " configurations, above the cap of " + std::to_string(cfg.max_configs) +
            "; raise max_configs or shrink the grid");
    }

    struct Task {
        std::size_t entry;
        std::size_t seed_index;
    };
    std::vector<Task> tasks;
    tasks.reserve(result.entries.size() * cfg.seeds.size());
    for (std::size_t e = 0; e < result.entries.size(); ++e) {
        for (std::size_t s = 0; s < cfg.seeds.size(); ++s) tasks.push_back({e, s});
    }

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        const auto problem = make_problem(cfg.problem);
        while (true) {
            const std::size_t t = next.fetch_add(1);
            if (t >= tasks.size()) break;
            const Task task = tasks[t];
            auto& entry = result.entries[task.entry];
            const DelayProfile profile =
                sample_delays(cfg.delay, cfg.workers, profile_seed(master_seed, task.seed_index));
            const std::uint64_t run_seed = run_stream_seed(master_seed, entry.method,
                                                           entry.point.config_index, task.seed_index);
            const RunTrace trace = run_method(*problem, entry.point.method_config, profile,
                                              cfg.budget, cfg.record_stride, run_seed);
            entry.per_seed[task.seed_index] = final_window_aggregate(trace, cfg.budget, cfg.metric);
        }
    };
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& th : pool) th.join();

    for (auto& e : result.entries) {
        double sum = 0.0;
        for (double v : e.per_seed) sum += v;
        e.aggregate = sum / static_cast<double>(e.per_seed.size());
    }
    result.ranking.resize(result.entries.size());
    for (std::size_t i = 0; i < result.ranking.size(); ++i) result.ranking[i] = i;
    std::stable_sort(result.ranking.begin(), result.ranking.end(),
                     [&](std::size_t a, std::size_t b) {
                         return result.entries[a].aggregate < result.entries[b].aggregate;
                     });
    for (std::size_t r = 0; r < result.ranking.size(); ++r) {
        result.entries[result.ranking[r]].rank = static_cast<int>(r) + 1;
    }
    return result;
}

// Indices of the best `count` entries of one method, by rank.
inline std::vector<std::size_t> top_entries(const SweepResult& result, Method method,
                                            std::size_t count = 3) {
    std::vector<std::size_t> out;
    for (std::size_t idx : result.ranking) {
        if (result.entries[idx].method != method) continue;
        out.push_back(idx);
        if (out.size() == count) break;
    }
    return out;
}

inline std::string config_label(const SweepEntry& e) {
    char buf[160];
    const auto& mc = e.point.method_config;
    if (mc.method == Method::RennalaSgd) {
        std::snprintf(buf, sizeof(buf), "%s g=%.4g B=%lld", to_string(mc.method), mc.gamma,
                      static_cast<long long>(mc.B));
    } else {
        std::snprintf(buf, sizeof(buf), "%s g=%.4g B=%lld p=%.4g B0=%lld", to_string(mc.method),
                      mc.gamma, static_cast<long long>(mc.B), mc.p,
                      static_cast<long long>(mc.B0));
    }
    return buf;
}

inline void write_leaderboard_csv(std::ostream& os, const SweepResult& result) {
    os << "rank,method,config_index,gamma,B,p,B0,alpha,aggregate";
    if (!result.entries.empty()) {
        for (std::size_t s = 0; s < result.entries.front().per_seed.size(); ++s) {
            os << ",seed" << s;
        }
    }
    os << "\n";
    char buf[256];
    for (std::size_t idx : result.ranking) {
        const auto& e = result.entries[idx];
        const auto& mc = e.point.method_config;
        std::snprintf(buf, sizeof(buf), "%d,%s,%zu,%.17g,%lld,%.17g,%lld,%.17g,%.17g", e.rank,
                      to_string(e.method), e.point.config_index, mc.gamma,
                      static_cast<long long>(mc.B), mc.p, static_cast<long long>(mc.B0), mc.alpha,
                      e.aggregate);
        os << buf;
        for (double v : e.per_seed) {
            std::snprintf(buf, sizeof(buf), ",%.17g", v);
            os << buf;
        }
        os << "\n";
    }
}

// Re-runs one entry for every seed (deterministic) and pools the records
// into a log-time-binned median curve for plotting.
inline PlotSeries plot_series_for(const ExperimentConfig& cfg, const SweepEntry& entry,
                                  std::uint64_t master_seed, int bins = 200) {
    const auto problem = make_problem(cfg.problem);
    std::vector<std::pair<double, double>> pooled;
    for (std::size_t s = 0; s < cfg.seeds.size(); ++s) {
        const DelayProfile profile =
            sample_delays(cfg.delay, cfg.workers, profile_seed(master_seed, s));
        const std::uint64_t run_seed =
            run_stream_seed(master_seed, entry.method, entry.point.config_index, s);
        const RunTrace trace = run_method(*problem, entry.point.method_config, profile, cfg.budget,
                                          cfg.record_stride, run_seed);
        const bool use_f = cfg.metric == "f_value";
        for (const auto& r : trace.records) {
            if (r.time > 0) pooled.emplace_back(r.time, use_f ? r.f_value : r.grad_sq_norm);
        }
    }
    PlotSeries series;
    series.label = config_label(entry);
    if (pooled.empty()) return series;
    double tmin = pooled.front().first, tmax = pooled.front().first;
    for (const auto& [t, v] : pooled) {
        tmin = std::min(tmin, t);
        tmax = std::max(tmax, t);
    }
    if (!(tmin < tmax)) {
        series.points = pooled;
        return series;
    }
    const double l0 = std::log(tmin), l1 = std::log(tmax);
    std::vector<std::vector<double>> bucket(static_cast<std::size_t>(bins));
    std::vector<double> tsum(static_cast<std::size_t>(bins), 0.0);
    std::vector<int> tcount(static_cast<std::size_t>(bins), 0);
    for (const auto& [t, v] : pooled) {
        auto b = static_cast<std::size_t>((std::log(t) - l0) / (l1 - l0) * (bins - 1));
        if (b >= bucket.size()) b = bucket.size() - 1;
        bucket[b].push_back(v);
        tsum[b] += t;
        ++tcount[b];
    }
    for (std::size_t b = 0; b < bucket.size(); ++b) {
        if (bucket[b].empty()) continue;
        std::sort(bucket[b].begin(), bucket[b].end());
        const std::size_t n = bucket[b].size();
        const double med = n % 2 == 1 ? bucket[b][n / 2]
                                      : 0.5 * (bucket[b][n / 2 - 1] + bucket[b][n / 2]);
        series.points.emplace_back(tsum[b] / tcount[b], med);
    }
    return series;
}

inline void write_top3_plot(std::ostream& os, const ExperimentConfig& cfg,
                            const SweepResult& result, std::uint64_t master_seed) {
    std::vector<PlotSeries> series;
    for (const auto& grid : cfg.methods) {
        for (std::size_t idx : top_entries(result, grid.method)) {
            series.push_back(plot_series_for(cfg, result.entries[idx], master_seed));
        }
    }
    const std::string ylab = cfg.metric == "f_value" ? "f(x)" : "||grad f(x)||^2";
    write_line_plot_svg(os, std::string("top-3 per method, ") + to_string(cfg.delay.kind) +
                                " delays",
                        "simulated time (s)", ylab, series);
}

}  // namespace rennala
