#pragma once

// Optimizer update rules: asynchronous minibatch SGD, the exact
// momentum-variance-reduction method, its inexact alpha-scaled variant,
// and the closed-form parameter selector that maps a target accuracy to
// (gamma, p, B, B0, K).

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rennala/problems.hpp"

namespace rennala {

// Compensated (Kahan-Babuska-Neumaier) running mean over vectors. Batch
// sizes reach sigma^2/eps in the initialization phase, where plain summation
// loses digits; compensation keeps the mean deterministic and accurate even
// when terms dwarf the running sum.
class MeanAccumulator {
  public:
    explicit MeanAccumulator(std::size_t dim) : sum_(dim, 0.0), comp_(dim, 0.0) {}

    void add(std::span<const double> v) {
        if (v.size() != sum_.size()) {
            throw std::invalid_argument("MeanAccumulator: dimension mismatch");
        }
        for (std::size_t i = 0; i < sum_.size(); ++i) {
            const double t = sum_[i] + v[i];
            if (std::abs(sum_[i]) >= std::abs(v[i])) {
                comp_[i] += (sum_[i] - t) + v[i];
            } else {
                comp_[i] += (v[i] - t) + sum_[i];
            }
            sum_[i] = t;
        }
        ++count_;
    }

    std::int64_t count() const noexcept { return count_; }

    std::vector<double> mean() const {
        if (count_ == 0) throw std::logic_error("MeanAccumulator: empty");
        std::vector<double> m(sum_.size());
        for (std::size_t i = 0; i < m.size(); ++i) {
            m[i] = (sum_[i] + comp_[i]) / static_cast<double>(count_);
        }
        return m;
    }

  private:
    std::vector<double> sum_;
    std::vector<double> comp_;
    std::int64_t count_ = 0;
};

// One round's worth of minibatch means. g_minus is empty in SGD mode.
// In pair mode, entry j of both means used the same sample xi.
struct Minibatch {
    std::vector<double> g_plus;
    std::vector<double> g_minus;
    std::int64_t count = 0;

    bool has_g_minus() const noexcept { return !g_minus.empty(); }
};

// Optimizer state shared by all three update rules.
struct MvrState {
    std::vector<double> x;  // iterate
    std::vector<double> g;  // gradient estimator
    double gamma = 0.0;     // step size, > 0 (0 allowed for diagnostics)
    double p = 1.0;         // momentum parameter in (0, 1]
    std::int64_t B = 1;     // per-round arrival count
    std::int64_t B0 = 1;    // initialization batch size
    double alpha = 1.0;     // inexact-variant correction scale in [0, 1]; 1 = exact
    std::int64_t k = 0;     // completed rounds
    std::int64_t oracle_calls = 0;
};

namespace detail {
inline void check_state_hparams(const MvrState& s) {
    if (!(s.p > 0.0 && s.p <= 1.0)) throw std::invalid_argument("optim: p must be in (0, 1]");
    // alpha = 0 is admitted: it disables the correction term entirely.
    if (!(s.alpha >= 0.0 && s.alpha <= 1.0)) {
        throw std::invalid_argument("optim: alpha must be in [0, 1]");
    }
    if (s.B < 1 || s.B0 < 1) throw std::invalid_argument("optim: B and B0 must be >= 1");
    if (!(s.gamma >= 0.0) || !std::isfinite(s.gamma)) {
        throw std::invalid_argument("optim: gamma must be finite and >= 0");
    }
    if (s.x.size() != s.g.size()) throw std::invalid_argument("optim: x/g dimension mismatch");
}

inline void check_finite(std::span<const double> v, const char* what) {
    for (double t : v) {
        if (!std::isfinite(t)) throw std::invalid_argument(std::string("optim: non-finite ") + what);
    }
}
}  // namespace detail

// x - gamma * g: the next iterate implied by the current state. The engine
// broadcasts this point before the round's batch exists; the step therefore
// never depends on the batch collected at it.
inline std::vector<double> next_x(const MvrState& s) {
    std::vector<double> xn(s.x.size());
    for (std::size_t i = 0; i < xn.size(); ++i) xn[i] = s.x[i] - s.gamma * s.g[i];
    return xn;
}

// Initial estimator: mean of B0 independent stochastic gradients at x0,
// drawn with sample seeds base..base+B0-1.
inline MvrState mvr_init(const StochasticProblem& problem, std::vector<double> x0, std::int64_t B0,
                         std::uint64_t run_seed, std::uint64_t sample_seed_base = 0) {
    if (B0 < 1) throw std::invalid_argument("mvr_init: B0 must be >= 1");
    check_dim(problem, x0.size());
    MeanAccumulator acc(x0.size());
    std::vector<double> g(x0.size());
    for (std::int64_t j = 0; j < B0; ++j) {
        problem.stochastic_grad(x0, {run_seed, sample_seed_base + static_cast<std::uint64_t>(j)}, g);
        acc.add(g);
    }
    MvrState s;
    s.x = std::move(x0);
    s.g = acc.mean();
    s.B0 = B0;
    s.oracle_calls = B0;
    return s;
}

// Exact update: x' = x - gamma g (before the estimator changes), then
// g' = g_plus + (1-p)(g - g_minus). The batch was evaluated at the pair
// (x, x'); its values flow only into g', never into x'.
inline MvrState mvr_step(const MvrState& state, const Minibatch& batch) {
    detail::check_state_hparams(state);
    detail::check_finite(state.x, "iterate");
    detail::check_finite(state.g, "estimator");
    if (batch.count != state.B) throw std::invalid_argument("mvr_step: batch count != B");
    if (!batch.has_g_minus()) throw std::invalid_argument("mvr_step: g_minus required");
    if (batch.g_plus.size() != state.x.size() || batch.g_minus.size() != state.x.size()) {
        throw std::invalid_argument("mvr_step: batch dimension mismatch");
    }

    MvrState next = state;
    next.x = next_x(state);
    if (state.p == 1.0) {
        next.g = batch.g_plus;  // the correction term vanishes identically
    } else {
        for (std::size_t i = 0; i < next.g.size(); ++i) {
            next.g[i] = batch.g_plus[i] + (1.0 - state.p) * (state.g[i] - batch.g_minus[i]);
        }
    }
    next.k = state.k + 1;
    next.oracle_calls = state.oracle_calls + 2 * state.B;
    return next;
}

// Minibatch SGD round: the batch mean was evaluated at the current iterate,
// and the step consumes it directly. g_minus must be absent.
inline MvrState sgd_step(const MvrState& state, const Minibatch& batch) {
    detail::check_state_hparams(state);
    detail::check_finite(state.x, "iterate");
    if (batch.count != state.B) throw std::invalid_argument("sgd_step: batch count != B");
    if (batch.has_g_minus()) throw std::invalid_argument("sgd_step: unexpected g_minus");
    if (batch.g_plus.size() != state.x.size()) {
        throw std::invalid_argument("sgd_step: batch dimension mismatch");
    }

    MvrState next = state;
    for (std::size_t i = 0; i < next.x.size(); ++i) {
        next.x[i] = state.x[i] - state.gamma * batch.g_plus[i];
    }
    next.g = batch.g_plus;
    next.k = state.k + 1;
    next.oracle_calls = state.oracle_calls + state.B;
    return next;
}

// Inexact variant: the correction reuses last round's stored gradient
// instead of recomputing at the old point with the current sample.
//   g' = (1-p) g + p grad_new + alpha (1-p)(grad_new - grad_old)
// grad_new is this round's minibatch mean at x'; grad_old is the previous
// round's mean (seeded from the initialization estimator on round 1).
inline MvrState inexact_mvr_step(const MvrState& state, std::span<const double> grad_new,
                                 std::span<const double> grad_old) {
    detail::check_state_hparams(state);
    detail::check_finite(state.x, "iterate");
    detail::check_finite(state.g, "estimator");
    if (grad_old.empty()) {
        throw std::invalid_argument(
            "inexact_mvr_step: missing cached gradient (seed it from the initialization estimator)");
    }
    if (grad_new.size() != state.x.size() || grad_old.size() != state.x.size()) {
        throw std::invalid_argument("inexact_mvr_step: gradient dimension mismatch");
    }

    MvrState next = state;
    next.x = next_x(state);
    for (std::size_t i = 0; i < next.g.size(); ++i) {
        next.g[i] = (1.0 - state.p) * state.g[i] + state.p * grad_new[i] +
                    state.alpha * (1.0 - state.p) * (grad_new[i] - grad_old[i]);
    }
    next.k = state.k + 1;
    next.oracle_calls = state.oracle_calls + state.B;
    return next;
}

// Outcome of the closed-form parameter selection.
//   Ok               the target regime holds; all parameters are usable
//   LowNoise         sigma^2 <= eps: variance reduction buys nothing, run
//                    plain minibatch SGD (p = 1)
//   AlreadyStationary 2 L_bar delta <= eps: the start point already meets
//                    the target, K = 0
enum class Theorem3Regime { Ok, LowNoise, AlreadyStationary };

inline const char* to_string(Theorem3Regime r) {
    switch (r) {
        case Theorem3Regime::Ok: return "ok";
        case Theorem3Regime::LowNoise: return "low_noise";
        case Theorem3Regime::AlreadyStationary: return "already_stationary";
    }
    return "?";
}

struct Theorem3Params {
    Theorem3Regime regime = Theorem3Regime::Ok;
    double gamma = 0.0;
    double p = 1.0;
    std::int64_t B = 1;
    std::int64_t B0 = 1;
    std::int64_t K = 0;
};

// gamma = 1/(4 L_bar), p = sqrt(eps)/sigma, B = ceil(6 sigma / sqrt(eps)),
// B0 = ceil(6 sigma^2 / eps), K = ceil(24 delta L_bar / eps + sigma/sqrt(eps)).
// Valid when eps < sigma^2 and eps < 2 L_bar delta; the two violations are
// reported distinctly via the regime field.
inline Theorem3Params theorem3_params(double eps, double sigma, double delta, double l_bar) {
    if (!(eps > 0.0)) throw std::invalid_argument("theorem3_params: eps must be > 0");
    if (!(sigma >= 0.0)) throw std::invalid_argument("theorem3_params: sigma must be >= 0");
    if (!(delta > 0.0)) throw std::invalid_argument("theorem3_params: delta must be > 0");
    if (!(l_bar > 0.0)) throw std::invalid_argument("theorem3_params: l_bar must be > 0");

    Theorem3Params out;
    out.gamma = 1.0 / (4.0 * l_bar);
    if (2.0 * l_bar * delta <= eps) {
        out.regime = Theorem3Regime::AlreadyStationary;
        out.K = 0;
        return out;
    }
    const double sqrt_eps = std::sqrt(eps);
    if (sigma * sigma <= eps) {
        // Low-noise fallback: p = 1 turns the method into minibatch SGD; the
        // batch still damps what noise there is.
        out.regime = Theorem3Regime::LowNoise;
        out.p = 1.0;
        out.B = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(6.0 * sigma * sigma / eps)));
        out.B0 = out.B;
        out.K = static_cast<std::int64_t>(std::ceil(24.0 * delta * l_bar / eps));
        return out;
    }
    out.p = sqrt_eps / sigma;
    out.B = static_cast<std::int64_t>(std::ceil(6.0 * sigma / sqrt_eps));
    out.B0 = static_cast<std::int64_t>(std::ceil(6.0 * sigma * sigma / eps));
    out.K = static_cast<std::int64_t>(std::ceil(24.0 * delta * l_bar / eps + sigma / sqrt_eps));
    return out;
}

}  // namespace rennala
