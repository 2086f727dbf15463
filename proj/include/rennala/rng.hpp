#pragma once

// Counter-based pseudo-random streams.
//
// Every random quantity in the simulator is derived from a 64-bit key by
// hashing, never from shared mutable generator state. This makes runs
// bit-reproducible and lets independent components (engine, optimizer,
// sweep workers) draw the same values without coordinating.

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

namespace rennala {

// SplitMix64 finalizer. Bijective on 64-bit values.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Order-sensitive key derivation: derive(k, a) != derive(k, a, 0).
constexpr std::uint64_t derive_key(std::uint64_t key) noexcept { return key; }

template <class... Rest>
constexpr std::uint64_t derive_key(std::uint64_t key, std::uint64_t head, Rest... rest) noexcept {
    return derive_key(mix64(key ^ (head + 0x9e3779b97f4a7c15ULL)), rest...);
}

// A keyed stream of uniform/gaussian variates. The i-th output depends only
// on (key, i), so equal keys give equal sequences on any thread.
class RandomStream {
  public:
    explicit RandomStream(std::uint64_t key) noexcept : key_(key) {}

    std::uint64_t next_u64() noexcept { return mix64(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }

    // Uniform on (0, 1]: never returns 0 so log() below is safe.
    double next_unit() noexcept {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    // Uniform on [lo, hi).
    double next_uniform(double lo, double hi) noexcept {
        return lo + (hi - lo) * static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Integer in [0, n). n must be >= 1. Uses rejection-free modulo of a
    // 64-bit hash; bias is negligible for the n used here (worker counts).
    std::uint64_t next_below(std::uint64_t n) noexcept { return next_u64() % n; }

    // Standard normal via Box-Muller, with the spare value cached.
    double next_gaussian() noexcept {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = next_unit();
        const double u2 = next_unit();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

  private:
    std::uint64_t key_ = 0;
    std::uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace rennala
