#pragma once

// Stochastic first-order oracles.
//
// A problem exposes the exact gradient and a seeded stochastic gradient.
// Noise is a pure function of (run_seed, sample_seed), so the engine can
// hand out sample identifiers at arrival time and the optimizer can evaluate
// the corresponding gradients later with bit-identical results.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "rennala/rng.hpp"

namespace rennala {

// Identifies one oracle sample xi. The same sample yields the same noise
// vector at every evaluation point.
struct OracleSample {
    std::uint64_t run_seed = 0;
    std::uint64_t sample_seed = 0;
};

class StochasticProblem {
  public:
    virtual ~StochasticProblem() = default;

    virtual int dim() const = 0;
    virtual double value(std::span<const double> x) const = 0;
    virtual void exact_grad(std::span<const double> x, std::span<double> out) const = 0;
    virtual void stochastic_grad(std::span<const double> x, const OracleSample& sample,
                                 std::span<double> out) const = 0;

    // Gradient pair at (x_old, x_new) sharing one sample. Overridable so a
    // problem can draw the shared noise once.
    virtual void stochastic_grad_pair(std::span<const double> x_old, std::span<const double> x_new,
                                      const OracleSample& sample, std::span<double> out_old,
                                      std::span<double> out_new) const {
        stochastic_grad(x_old, sample, out_old);
        stochastic_grad(x_new, sample, out_new);
    }

    // Default starting point of the optimization run.
    virtual std::vector<double> start_point() const = 0;
};

inline void check_dim(const StochasticProblem& problem, std::size_t got) {
    if (got != static_cast<std::size_t>(problem.dim())) {
        throw std::invalid_argument("problem: dimension mismatch");
    }
}

inline double grad_sq_norm(const StochasticProblem& problem, std::span<const double> x) {
    std::vector<double> g(x.size());
    problem.exact_grad(x, g);
    double s = 0.0;
    for (double v : g) s += v * v;
    return s;
}

// f(x) = (1/2) x'Ax - b'x with A = (1/4) tridiag(-1, 2, -1) and
// b = (-1/4, 0, ..., 0). A is positive definite with eigenvalues
// sin^2(k*pi / (2(d+1))) in (0, 1), so f is L-smooth with L < 1.
// Stochastic gradients add isotropic Gaussian noise:
// grad f(x; zeta) = Ax - b + zeta, zeta ~ N(0, sigma_add^2 I).
// Because the noise does not depend on x, same-sample gradient differences
// equal A(x - y) exactly and the mean-squared smoothness constant is L.
class QuadraticProblem final : public StochasticProblem {
  public:
    QuadraticProblem(int dim, double sigma_add) : d_(dim), sigma_add_(sigma_add) {
        if (dim < 1) throw std::invalid_argument("QuadraticProblem: dim must be >= 1");
        if (sigma_add < 0.0) throw std::invalid_argument("QuadraticProblem: sigma_add must be >= 0");
    }

    int dim() const override { return d_; }
    double sigma_add() const noexcept { return sigma_add_; }

    // Total noise standard deviation: E||zeta||^2 = d * sigma_add^2.
    double total_sigma() const { return std::sqrt(static_cast<double>(d_)) * sigma_add_; }

    // Largest eigenvalue of A, closed form for the scaled second-difference
    // matrix. Equals both the smoothness constant of f and the mean-squared
    // smoothness constant of the additive-noise oracle.
    double smoothness_constant() const {
        const double s = std::sin(static_cast<double>(d_) * std::numbers::pi /
                                  (2.0 * (static_cast<double>(d_) + 1.0)));
        return s * s;
    }

    double value(std::span<const double> x) const override {
        check_dim(*this, x.size());
        // (1/2) x'Ax - b'x with the tridiagonal product expanded inline.
        double quad = 0.0;
        for (int i = 0; i < d_; ++i) {
            double ax = 0.5 * x[static_cast<std::size_t>(i)];
            if (i > 0) ax -= 0.25 * x[static_cast<std::size_t>(i - 1)];
            if (i + 1 < d_) ax -= 0.25 * x[static_cast<std::size_t>(i + 1)];
            quad += x[static_cast<std::size_t>(i)] * ax;
        }
        return 0.5 * quad + 0.25 * x[0];
    }

    void exact_grad(std::span<const double> x, std::span<double> out) const override {
        check_dim(*this, x.size());
        check_dim(*this, out.size());
        for (int i = 0; i < d_; ++i) {
            double ax = 0.5 * x[static_cast<std::size_t>(i)];
            if (i > 0) ax -= 0.25 * x[static_cast<std::size_t>(i - 1)];
            if (i + 1 < d_) ax -= 0.25 * x[static_cast<std::size_t>(i + 1)];
            out[static_cast<std::size_t>(i)] = ax;
        }
        out[0] += 0.25;  // minus b_1 = -(-1/4)
    }

    void stochastic_grad(std::span<const double> x, const OracleSample& sample,
                         std::span<double> out) const override {
        exact_grad(x, out);
        add_noise(sample, out);
    }

    void stochastic_grad_pair(std::span<const double> x_old, std::span<const double> x_new,
                              const OracleSample& sample, std::span<double> out_old,
                              std::span<double> out_new) const override {
        exact_grad(x_old, out_old);
        exact_grad(x_new, out_new);
        if (sigma_add_ == 0.0) return;
        RandomStream rng(noise_key(sample));
        for (int i = 0; i < d_; ++i) {
            const double z = sigma_add_ * rng.next_gaussian();
            out_old[static_cast<std::size_t>(i)] += z;
            out_new[static_cast<std::size_t>(i)] += z;
        }
    }

    // x0 = (sqrt(d), 0, ..., 0).
    std::vector<double> start_point() const override {
        std::vector<double> x(static_cast<std::size_t>(d_), 0.0);
        x[0] = std::sqrt(static_cast<double>(d_));
        return x;
    }

    // Solves Ax = b by the tridiagonal (Thomas) algorithm.
    std::vector<double> minimizer() const {
        std::vector<double> diag(static_cast<std::size_t>(d_), 0.5);
        std::vector<double> rhs(static_cast<std::size_t>(d_), 0.0);
        rhs[0] = -0.25;
        for (int i = 1; i < d_; ++i) {
            const double w = -0.25 / diag[static_cast<std::size_t>(i - 1)];
            diag[static_cast<std::size_t>(i)] -= w * -0.25;
            rhs[static_cast<std::size_t>(i)] -= w * rhs[static_cast<std::size_t>(i - 1)];
        }
        std::vector<double> x(static_cast<std::size_t>(d_));
        x[static_cast<std::size_t>(d_ - 1)] =
            rhs[static_cast<std::size_t>(d_ - 1)] / diag[static_cast<std::size_t>(d_ - 1)];
        for (int i = d_ - 2; i >= 0; --i) {
            x[static_cast<std::size_t>(i)] =
                (rhs[static_cast<std::size_t>(i)] + 0.25 * x[static_cast<std::size_t>(i + 1)]) /
                diag[static_cast<std::size_t>(i)];
        }
        return x;
    }

    // inf f = f(A^{-1} b) = -(1/2) b'A^{-1}b.
    double min_value() const {
        auto xstar = minimizer();
        return value(xstar);
    }

  private:
    std::uint64_t noise_key(const OracleSample& sample) const {
        return derive_key(sample.run_seed, 0x6e6f697365ULL, sample.sample_seed);  // "noise"
    }

    void add_noise(const OracleSample& sample, std::span<double> out) const {
        if (sigma_add_ == 0.0) return;
        RandomStream rng(noise_key(sample));
        for (int i = 0; i < d_; ++i) {
            out[static_cast<std::size_t>(i)] += sigma_add_ * rng.next_gaussian();
        }
    }

    int d_;
    double sigma_add_;
};

}  // namespace rennala
