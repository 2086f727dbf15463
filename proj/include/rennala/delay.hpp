#pragma once

// Worker speed models.
//
// Two representations are supported: fixed per-gradient computation times
// (one tau per worker) and piecewise-constant completion-rate functions
// (gradients per second). Rates are kept piecewise-constant so interval
// integrals are exact; continuous rate models must be discretized by the
// caller at construction time.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "rennala/rng.hpp"

namespace rennala {

// Per-worker seconds to compute one stochastic gradient.
class DelayProfile {
  public:
    DelayProfile() = default;

    explicit DelayProfile(std::vector<double> taus) : taus_(std::move(taus)) {
        if (taus_.empty()) {
            throw std::invalid_argument("DelayProfile: at least one worker required");
        }
        for (double t : taus_) {
            if (!(t > 0.0) || !std::isfinite(t)) {
                throw std::invalid_argument(
                    "DelayProfile: fixed computation model requires tau > 0 for every worker");
            }
        }
    }

    std::size_t size() const noexcept { return taus_.size(); }
    double tau(std::size_t worker) const { return taus_.at(worker); }
    const std::vector<double>& taus() const noexcept { return taus_; }

    // Taus in nondecreasing order; the profile itself may be permuted.
    std::vector<double> sorted_view() const {
        std::vector<double> s = taus_;
        std::sort(s.begin(), s.end());
        return s;
    }

  private:
    std::vector<double> taus_;
};

enum class DelayKind { Sqrt, Uniform, Mixture };

inline const char* to_string(DelayKind k) {
    switch (k) {
        case DelayKind::Sqrt: return "sqrt";
        case DelayKind::Uniform: return "uniform";
        case DelayKind::Mixture: return "mixture";
    }
    return "?";
}

inline DelayKind delay_kind_from_string(const std::string& s) {
    if (s == "sqrt") return DelayKind::Sqrt;
    if (s == "uniform") return DelayKind::Uniform;
    if (s == "mixture") return DelayKind::Mixture;
    throw std::invalid_argument("unknown delay kind: " + s);
}

// Delay-model parameters as they appear in experiment configs.
//   sqrt     tau_i = sqrt(i), optionally permuted across workers
//   uniform  i.i.d. on [lo, hi]; lo/hi default to [1, 10n]
//   mixture  `peaks` Gaussian peaks in [1, 10n], per-worker draws clipped
//            to [1, 10n]; component stddev defaults to n
struct DelaySpec {
    DelayKind kind = DelayKind::Sqrt;
    bool permute = true;
    int peaks = 3;
    double stddev = 0.0;  // <= 0 selects the default (n)
    double lo = 0.0;      // uniform bounds; <= 0 selects the defaults
    double hi = 0.0;
};

// Samples a worker delay profile. Deterministic given (spec, n, seed).
inline DelayProfile sample_delays(const DelaySpec& spec, int n, std::uint64_t seed) {
    if (n < 1) {
        throw std::invalid_argument("sample_delays: worker count must be >= 1");
    }
    RandomStream rng(derive_key(seed, 0x64656c6179ULL));  // "delay"
    std::vector<double> taus(static_cast<std::size_t>(n));

    switch (spec.kind) {
        case DelayKind::Sqrt: {
            for (int i = 0; i < n; ++i) {
                taus[static_cast<std::size_t>(i)] = std::sqrt(static_cast<double>(i + 1));
            }
            if (spec.permute) {
                for (std::size_t i = taus.size() - 1; i > 0; --i) {
                    std::size_t j = static_cast<std::size_t>(rng.next_below(i + 1));
                    std::swap(taus[i], taus[j]);
                }
            }
            break;
        }
        case DelayKind::Uniform: {
            const double lo = spec.lo > 0.0 ? spec.lo : 1.0;
            const double hi = spec.hi > 0.0 ? spec.hi : 10.0 * n;
            if (lo >= hi) {
                throw std::invalid_argument("sample_delays: uniform model requires lo < hi");
            }
            for (auto& t : taus) {
                t = rng.next_uniform(lo, hi);
            }
            break;
        }
        case DelayKind::Mixture: {
            if (spec.peaks < 1) {
                throw std::invalid_argument("sample_delays: mixture model requires >= 1 peak");
            }
            const double lo = 1.0;
            const double hi = 10.0 * n;
            const double sd = spec.stddev > 0.0 ? spec.stddev : static_cast<double>(n);
            std::vector<double> peaks(static_cast<std::size_t>(spec.peaks));
            for (auto& c : peaks) {
                c = rng.next_uniform(lo, hi);
            }
            for (auto& t : taus) {
                const double center = peaks[rng.next_below(peaks.size())];
                t = std::clamp(center + sd * rng.next_gaussian(), lo, hi);
            }
            break;
        }
    }
    return DelayProfile(std::move(taus));
}

// Piecewise-constant completion rate (gradients per second). The last piece
// extends to +infinity, so interval integrals are exact rational arithmetic
// over the breakpoint grid.
class RateFunction {
  public:
    RateFunction(std::vector<double> breakpoints, std::vector<double> rates)
        : breaks_(std::move(breakpoints)), rates_(std::move(rates)) {
        if (breaks_.empty() || breaks_.size() != rates_.size()) {
            throw std::invalid_argument("RateFunction: need matching breakpoints/rates");
        }
        if (breaks_.front() != 0.0) {
            throw std::invalid_argument("RateFunction: breakpoints must start at 0");
        }
        for (std::size_t i = 0; i + 1 < breaks_.size(); ++i) {
            if (!(breaks_[i] < breaks_[i + 1])) {
                throw std::invalid_argument("RateFunction: breakpoints must be strictly increasing");
            }
        }
        for (double r : rates_) {
            if (!(r >= 0.0) || !std::isfinite(r)) {
                throw std::invalid_argument("RateFunction: rates must be nonnegative and finite");
            }
        }
        // Prefix integrals up to each breakpoint.
        prefix_.assign(breaks_.size(), 0.0);
        for (std::size_t i = 0; i + 1 < breaks_.size(); ++i) {
            prefix_[i + 1] = prefix_[i] + rates_[i] * (breaks_[i + 1] - breaks_[i]);
        }
    }

    static RateFunction constant(double rate) { return RateFunction({0.0}, {rate}); }

    std::size_t pieces() const noexcept { return rates_.size(); }
    double piece_start(std::size_t i) const { return breaks_.at(i); }
    double piece_rate(std::size_t i) const { return rates_.at(i); }
    double piece_prefix_integral(std::size_t i) const { return prefix_.at(i); }

    // Integral of the rate over [0, t], exact over the piece structure.
    double integral_to(double t) const {
        if (t <= 0.0) return 0.0;
        std::size_t i = piece_index(t);
        return prefix_[i] + rates_[i] * (t - breaks_[i]);
    }

    // Integral over [t1, t2].
    double integral(double t1, double t2) const {
        if (t2 < t1 || t1 < 0.0) {
            throw std::invalid_argument("RateFunction::integral: need 0 <= t1 <= t2");
        }
        return integral_to(t2) - integral_to(t1);
    }

    // Index of the piece containing t.
    std::size_t piece_index(double t) const {
        auto it = std::upper_bound(breaks_.begin(), breaks_.end(), t);
        return static_cast<std::size_t>(std::distance(breaks_.begin(), it)) - 1;
    }

  private:
    std::vector<double> breaks_;
    std::vector<double> rates_;
    std::vector<double> prefix_;
};

// Number of whole gradients a worker with the given rate completes on
// [t1, t2]: floor of the exact piecewise integral.
inline std::int64_t gradients_completed(const RateFunction& rate, double t1, double t2) {
    return static_cast<std::int64_t>(std::floor(rate.integral(t1, t2)));
}

}  // namespace rennala
