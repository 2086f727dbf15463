#pragma once

// Discrete-event simulation of the server/worker loop.
//
// Workers compute gradients (or gradient pairs) at announced points and the
// server consumes the first b arrivals of each round. Simulated time advances
// only through completion events; ties are delivered in ascending worker id,
// so every run is reproducible bit-for-bit.

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <ostream>
#include <queue>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rennala/delay.hpp"
#include "rennala/optim.hpp"
#include "rennala/problems.hpp"

namespace rennala {

enum class PayloadKind { Single, Pair };

// One completed oracle reply. For pair payloads both gradients share the
// sample identified by sample_seed.
struct Arrival {
    int worker_id = 0;       // 0-based index into the profile
    double time = 0.0;       // completion timestamp
    std::int64_t round = 0;  // round the computation targeted
    std::uint64_t sample_seed = 0;
    PayloadKind kind = PayloadKind::Single;
};

// Event clock: a min-heap of (time, worker) completion events processed in
// lexicographic order. now never decreases.
class SimClock {
  public:
    void schedule(double time, int worker) { queue_.push({time, worker}); }

    bool empty() const noexcept { return queue_.empty(); }

    std::pair<double, int> pop() {
        auto ev = queue_.top();
        queue_.pop();
        if (ev.first < now_) throw std::logic_error("SimClock: time went backwards");
        now_ = ev.first;
        return ev;
    }

    double now() const noexcept { return now_; }

  private:
    using Event = std::pair<double, int>;  // (time, worker id)
    std::priority_queue<Event, std::vector<Event>, std::greater<Event>> queue_;
    double now_ = 0.0;
};

struct CollectResult {
    double finish = 0.0;
    std::vector<Arrival> arrivals;  // in delivery order
};

// Collects b arrivals of the requested kind starting at `start`.
//
// restart = true:  every worker begins a fresh computation at `start`
//                  (in-flight work at stale points is discarded), so worker i
//                  delivers at start + c * cost_i for c = 1, 2, ...
// restart = false: worst-case offset — each worker's in-flight computation
//                  completed just after the boundary and is unusable, so the
//                  first fresh delivery lands at start + 2 * cost_i.
//
// cost_i is tau_i for singles and 2 tau_i for a gradient pair. Workers
// immediately begin a new computation after each delivery.
inline CollectResult collect_batch(const DelayProfile& profile, std::int64_t b, PayloadKind kind,
                                   double start, bool restart, std::int64_t round = 0,
                                   std::uint64_t sample_seed_base = 0) {
    if (profile.size() == 0) throw std::invalid_argument("collect_batch: empty profile");
    if (b < 1) throw std::invalid_argument("collect_batch: b must be >= 1");

    const int n = static_cast<int>(profile.size());
    const double cost_scale = (kind == PayloadKind::Pair) ? 2.0 : 1.0;
    // Completion count per worker, offset by one in worst-case mode so the
    // c-th delivery of worker i lands at start + (c + offset) * cost_i.
    const std::int64_t offset = restart ? 0 : 1;

    std::vector<double> cost(static_cast<std::size_t>(n));
    std::vector<std::int64_t> delivered(static_cast<std::size_t>(n), 0);
    SimClock clock;
    for (int i = 0; i < n; ++i) {
        cost[static_cast<std::size_t>(i)] = cost_scale * profile.tau(static_cast<std::size_t>(i));
        clock.schedule(start + static_cast<double>(1 + offset) * cost[static_cast<std::size_t>(i)], i);
    }

    CollectResult out;
    out.arrivals.reserve(static_cast<std::size_t>(b));
    while (static_cast<std::int64_t>(out.arrivals.size()) < b) {
        auto [t, w] = clock.pop();
        Arrival a;
        a.worker_id = w;
        a.time = t;
        a.round = round;
        a.sample_seed = sample_seed_base + static_cast<std::uint64_t>(out.arrivals.size());
        a.kind = kind;
        out.arrivals.push_back(a);
        auto& c = delivered[static_cast<std::size_t>(w)];
        ++c;
        clock.schedule(start + static_cast<double>(c + 1 + offset) * cost[static_cast<std::size_t>(w)],
                       w);
    }
    out.finish = out.arrivals.back().time;
    return out;
}

struct TraceRecord {
    double time = 0.0;
    std::int64_t iter = 0;
    double grad_sq_norm = 0.0;
    double f_value = 0.0;
    std::int64_t oracle_calls = 0;
};

struct RunTrace {
    std::vector<TraceRecord> records;

    // CSV with 17 significant digits so re-reading reproduces the doubles.
    void to_csv(std::ostream& os) const {
        os << "time,iter,grad_sq_norm,f_value,oracle_calls\n";
        char buf[128];
        for (const auto& r : records) {
            std::snprintf(buf, sizeof(buf), "%.17g,%lld,%.17g,%.17g,%lld\n", r.time,
                          static_cast<long long>(r.iter), r.grad_sq_norm, r.f_value,
                          static_cast<long long>(r.oracle_calls));
            os << buf;
        }
    }
};

enum class Method { RennalaSgd, RennalaMvr, RennalaMvrInexact };

inline const char* to_string(Method m) {
    switch (m) {
        case Method::RennalaSgd: return "rennala_sgd";
        case Method::RennalaMvr: return "rennala_mvr";
        case Method::RennalaMvrInexact: return "rennala_mvr_inexact";
    }
    return "?";
}

inline Method method_from_string(const std::string& s) {
    if (s == "rennala_sgd") return Method::RennalaSgd;
    if (s == "rennala_mvr") return Method::RennalaMvr;
    if (s == "rennala_mvr_inexact") return Method::RennalaMvrInexact;
    throw std::invalid_argument("unknown method: " + s);
}

struct MethodConfig {
    Method method = Method::RennalaSgd;
    double gamma = 0.0;
    double p = 1.0;
    std::int64_t B = 1;
    std::int64_t B0 = 1;
    double alpha = 1.0;
};

// Called after the initialization batch (k = 0) and after every completed
// round k with the simulated time and the new iterate.
using RoundObserver = std::function<void(std::int64_t k, double time, std::span<const double> x)>;

// Runs one method until the next collection would finish past `budget`
// (simulated seconds) or `max_rounds` rounds completed. The trace holds the
// t = 0 initialization record plus one record per `record_every`-th round and
// the final completed round. Deterministic given (config, profile, run_seed).
inline RunTrace run_method(const StochasticProblem& problem, const MethodConfig& cfg,
                           const DelayProfile& profile, double budget, std::int64_t record_every,
                           std::uint64_t run_seed, std::int64_t max_rounds = -1,
                           std::vector<double> x0 = {}, const RoundObserver& observer = {}) {
    if (!(budget > 0.0)) throw std::invalid_argument("run_method: budget must be > 0");
    if (record_every < 1) throw std::invalid_argument("run_method: record_every must be >= 1");
    if (profile.size() == 0) throw std::invalid_argument("run_method: empty profile");
    if (x0.empty()) x0 = problem.start_point();
    check_dim(problem, x0.size());

    const std::size_t d = x0.size();
    RunTrace trace;
    auto record = [&](double time, std::int64_t iter, std::span<const double> x,
                      std::int64_t calls) {
        TraceRecord r;
        r.time = time;
        r.iter = iter;
        r.grad_sq_norm = grad_sq_norm(problem, x);
        r.f_value = problem.value(x);
        r.oracle_calls = calls;
        trace.records.push_back(r);
    };
    record(0.0, 0, x0, 0);

    MvrState state;
    state.gamma = cfg.gamma;
    state.p = cfg.p;
    state.B = cfg.B;
    state.B0 = cfg.B0;
    state.alpha = cfg.alpha;

    double now = 0.0;
    std::uint64_t sample_counter = 0;
    std::vector<double> cached_grad;  // inexact variant: last round's mean

    const bool needs_init = cfg.method != Method::RennalaSgd;
    if (needs_init) {
        auto init = collect_batch(profile, cfg.B0, PayloadKind::Single, 0.0, true, 0, sample_counter);
        if (init.finish > budget) {
            return trace;  // nothing completes; only the initialization record
        }
        MeanAccumulator acc(d);
        std::vector<double> g(d);
        for (const auto& a : init.arrivals) {
            problem.stochastic_grad(x0, {run_seed, a.sample_seed}, g);
            acc.add(g);
        }
        state.x = x0;
        state.g = acc.mean();
        state.oracle_calls = cfg.B0;
        now = init.finish;
        sample_counter += static_cast<std::uint64_t>(cfg.B0);
        if (cfg.method == Method::RennalaMvrInexact) cached_grad = state.g;
    } else {
        state.x = x0;
        state.g.assign(d, 0.0);
    }
    if (observer) observer(0, now, state.x);

    std::vector<double> g_old(d), g_new(d);
    bool out_of_budget = false;
    for (std::int64_t k = 1; !out_of_budget && (max_rounds < 0 || k <= max_rounds); ++k) {
        switch (cfg.method) {
            case Method::RennalaMvr: {
                const std::vector<double> xnext = next_x(state);
                auto cc = collect_batch(profile, cfg.B, PayloadKind::Pair, now, true, k, sample_counter);
                if (cc.finish > budget) { out_of_budget = true; break; }
                MeanAccumulator minus(d), plus(d);
                for (const auto& a : cc.arrivals) {
                    problem.stochastic_grad_pair(state.x, xnext, {run_seed, a.sample_seed}, g_old,
                                                 g_new);
                    minus.add(g_old);
                    plus.add(g_new);
                }
                Minibatch batch;
                batch.g_plus = plus.mean();
                batch.g_minus = minus.mean();
                batch.count = cfg.B;
                state = mvr_step(state, batch);
                now = cc.finish;
                sample_counter += static_cast<std::uint64_t>(cfg.B);
                break;
            }
            case Method::RennalaSgd: {
                auto cc = collect_batch(profile, cfg.B, PayloadKind::Single, now, true, k, sample_counter);
                if (cc.finish > budget) { out_of_budget = true; break; }
                MeanAccumulator acc(d);
                for (const auto& a : cc.arrivals) {
                    problem.stochastic_grad(state.x, {run_seed, a.sample_seed}, g_new);
                    acc.add(g_new);
                }
                Minibatch batch;
                batch.g_plus = acc.mean();
                batch.count = cfg.B;
                state = sgd_step(state, batch);
                now = cc.finish;
                sample_counter += static_cast<std::uint64_t>(cfg.B);
                break;
            }
            case Method::RennalaMvrInexact: {
                const std::vector<double> xnext = next_x(state);
                auto cc = collect_batch(profile, cfg.B, PayloadKind::Single, now, true, k, sample_counter);
                if (cc.finish > budget) { out_of_budget = true; break; }
                MeanAccumulator acc(d);
                for (const auto& a : cc.arrivals) {
                    problem.stochastic_grad(xnext, {run_seed, a.sample_seed}, g_new);
                    acc.add(g_new);
                }
                const std::vector<double> mean_new = acc.mean();
                state = inexact_mvr_step(state, mean_new, cached_grad);
                cached_grad = mean_new;
                now = cc.finish;
                sample_counter += static_cast<std::uint64_t>(cfg.B);
                break;
            }
        }
        if (out_of_budget) break;

        if (observer) observer(k, now, state.x);
        if (k % record_every == 0) record(now, k, state.x, state.oracle_calls);
    }

    // Keep the last completed round even when the stride skipped it.
    if (state.k > 0 && trace.records.back().iter != state.k) {
        record(now, state.k, state.x, state.oracle_calls);
    }
    return trace;
}

}  // namespace rennala
