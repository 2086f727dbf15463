#pragma once

// Hard-instance constructions for the time lower bound: the progress
// measure, the chain function F_T with its analytic gradient, the smoothed
// step Gamma built from an integrated bump, the coordinate masks Theta_i,
// and the probability-p zero-chain gradient estimator.
//
// Chain constants quoted by the lemma suites:
//   Delta0 = 12   initial gap per coordinate, F_T(0) - inf F_T <= Delta0 T
//   ell1   = 152  Lipschitz constant of grad F_T in the l1 sense
//   gammaInf = 23 sup-norm bound on grad F_T
//   varsigma = 23, ellBar1 = 328  estimator variance / mean-squared
//                                 smoothness constants

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

namespace rennala::hardness {

inline constexpr double kDelta0 = 12.0;
inline constexpr double kEll1 = 152.0;
inline constexpr double kGammaInf = 23.0;
inline constexpr double kVarsigma = 23.0;
inline constexpr double kEllBar1 = 328.0;

// Psi: 0 up to 1/2, then exp(1 - 1/(2t-1)^2), increasing to e.
inline double psi(double t) {
    if (t <= 0.5) return 0.0;
    const double u = 2.0 * t - 1.0;
    return std::exp(1.0 - 1.0 / (u * u));
}

inline double psi_prime(double t) {
    if (t <= 0.5) return 0.0;
    const double u = 2.0 * t - 1.0;
    return psi(t) * 4.0 / (u * u * u);
}

// Phi(t) = sqrt(e) * integral_{-inf}^t exp(-s^2/2) ds, evaluated through the
// complementary error function (accurate to ~1e-15 relative, well inside the
// 1e-12 requirement).
inline double phi(double t) {
    return std::sqrt(std::numbers::e) * std::sqrt(std::numbers::pi / 2.0) *
           std::erfc(-t / std::numbers::sqrt2);
}

inline double phi_prime(double t) { return std::sqrt(std::numbers::e) * std::exp(-0.5 * t * t); }

// The bump whose normalized integral smooths the step between 1/4 and 1/2.
inline double lambda_bump(double t) {
    if (t <= 0.25 || t >= 0.5) return 0.0;
    return std::exp(-1.0 / (100.0 * (t - 0.25) * (0.5 - t)));
}

// Progress: largest index whose magnitude strictly exceeds alpha, with a
// virtual unit zeroth coordinate (so prog of the zero vector is 0 for any
// alpha < 1). alpha = 1 is admitted for the chain-completion threshold; the
// virtual coordinate then no longer qualifies and the floor stays 0.
inline int prog(std::span<const double> x, double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw std::invalid_argument("prog: alpha must be in [0, 1]");
    }
    for (int i = static_cast<int>(x.size()); i >= 1; --i) {
        if (std::abs(x[static_cast<std::size_t>(i - 1)]) > alpha) return i;
    }
    return 0;  // |x_0| = 1 > alpha
}

// Chain length plus the precomputed normalizer and cumulative table for
// Gamma. All fixed integrals use composite Simpson on quadrature_resolution
// equal cells over [1/4, 1/2].
class ChainInstance {
  public:
    explicit ChainInstance(int chain_length, int quadrature_resolution = 10000)
        : T_(chain_length), resolution_(quadrature_resolution) {
        if (chain_length < 1) throw std::invalid_argument("ChainInstance: T must be >= 1");
        if (quadrature_resolution < 1000) {
            throw std::invalid_argument("ChainInstance: quadrature resolution must be >= 1000");
        }
        cum_.resize(static_cast<std::size_t>(resolution_) + 1, 0.0);
        const double h = 0.25 / static_cast<double>(resolution_);
        for (int j = 0; j < resolution_; ++j) {
            const double a = 0.25 + h * static_cast<double>(j);
            cum_[static_cast<std::size_t>(j) + 1] =
                cum_[static_cast<std::size_t>(j)] + simpson_cell(a, a + h);
        }
        norm_ = cum_.back();
    }

    int T() const noexcept { return T_; }
    int quadrature_resolution() const noexcept { return resolution_; }
    double gamma_norm_const() const noexcept { return norm_; }

    // Gamma: 0 below 1/4, 1 above 1/2, normalized integral of the bump in
    // between. Monotone nondecreasing by construction.
    double gamma(double t) const {
        if (t <= 0.25) return 0.0;
        if (t >= 0.5) return 1.0;
        const double h = 0.25 / static_cast<double>(resolution_);
        auto j = static_cast<std::size_t>((t - 0.25) / h);
        if (j >= cum_.size() - 1) j = cum_.size() - 2;
        const double a = 0.25 + h * static_cast<double>(j);
        return (cum_[j] + simpson_cell(a, t)) / norm_;
    }

  private:
    static double simpson_cell(double a, double b) {
        return (b - a) / 6.0 *
               (lambda_bump(a) + 4.0 * lambda_bump(0.5 * (a + b)) + lambda_bump(b));
    }

    int T_;
    int resolution_;
    double norm_ = 0.0;
    std::vector<double> cum_;
};

inline double gamma_bump(const ChainInstance& inst, double t) { return inst.gamma(t); }

namespace detail {
inline void check_dim(const ChainInstance& inst, std::span<const double> x) {
    if (x.size() != static_cast<std::size_t>(inst.T())) {
        throw std::invalid_argument("hardness: point dimension must equal the chain length");
    }
}
}  // namespace detail

// F_T(x) = sum_{i=1}^T ( Psi(-x_{i-1}) Phi(-x_i) - Psi(x_{i-1}) Phi(x_i) )
// with the virtual x_0 = 1 (so the i = 1 term is -Psi(1) Phi(x_1)).
inline double chain_value(const ChainInstance& inst, std::span<const double> x) {
    detail::check_dim(inst, x);
    double sum = 0.0;
    double prev = 1.0;
    for (int i = 0; i < inst.T(); ++i) {
        const double xi = x[static_cast<std::size_t>(i)];
        sum += psi(-prev) * phi(-xi) - psi(prev) * phi(xi);
        prev = xi;
    }
    return sum;
}

// Analytic gradient of F_T via the product rule; O(T).
inline std::vector<double> chain_grad(const ChainInstance& inst, std::span<const double> x) {
    detail::check_dim(inst, x);
    const int T = inst.T();
    std::vector<double> g(static_cast<std::size_t>(T));
    for (int j = 1; j <= T; ++j) {
        const double xp = (j == 1) ? 1.0 : x[static_cast<std::size_t>(j - 2)];
        const double xj = x[static_cast<std::size_t>(j - 1)];
        double gj = -psi(-xp) * phi_prime(-xj) - psi(xp) * phi_prime(xj);
        if (j < T) {
            const double xn = x[static_cast<std::size_t>(j)];
            gj += -psi_prime(-xj) * phi(-xn) - psi_prime(xj) * phi(xn);
        }
        g[static_cast<std::size_t>(j - 1)] = gj;
    }
    return g;
}

// Theta_i(x) = Gamma(1 - || Gamma(|x_{>=i}|) ||_2) for all i at once
// (suffix sums make the batch O(T)). Sandwich property:
//   1{i > prog_{1/4}(x)} <= Theta_i(x) <= 1{i > prog_{1/2}(x)}.
inline std::vector<double> theta_all(const ChainInstance& inst, std::span<const double> x) {
    detail::check_dim(inst, x);
    const int T = inst.T();
    std::vector<double> th(static_cast<std::size_t>(T));
    double suffix_sq = 0.0;
    for (int i = T; i >= 1; --i) {
        const double gi = inst.gamma(std::abs(x[static_cast<std::size_t>(i - 1)]));
        suffix_sq += gi * gi;
        th[static_cast<std::size_t>(i - 1)] = inst.gamma(1.0 - std::sqrt(suffix_sq));
    }
    return th;
}

// Single-coordinate mask, 1-based index.
inline double theta(const ChainInstance& inst, std::span<const double> x, int i) {
    detail::check_dim(inst, x);
    if (i < 1 || i > inst.T()) throw std::invalid_argument("theta: index out of range");
    double suffix_sq = 0.0;
    for (int j = i; j <= inst.T(); ++j) {
        const double gj = inst.gamma(std::abs(x[static_cast<std::size_t>(j - 1)]));
        suffix_sq += gj * gj;
    }
    return inst.gamma(1.0 - std::sqrt(suffix_sq));
}

// Probability-p zero-chain estimator:
//   [g(x, xi)]_i = grad_i F_T(x) * (1 + Theta_i(x) (xi/p - 1)),
// with one Bernoulli(p) draw xi in {0, 1} shared by all coordinates.
inline std::vector<double> zero_chain_grad(const ChainInstance& inst, std::span<const double> x,
                                           int xi, double p) {
    if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("zero_chain_grad: p must be in (0, 1]");
    if (xi != 0 && xi != 1) throw std::invalid_argument("zero_chain_grad: xi must be 0 or 1");
    std::vector<double> g = chain_grad(inst, x);
    const std::vector<double> th = theta_all(inst, x);
    const double w = static_cast<double>(xi) / p - 1.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        g[i] *= 1.0 + th[i] * w;
    }
    return g;
}

}  // namespace rennala::hardness
