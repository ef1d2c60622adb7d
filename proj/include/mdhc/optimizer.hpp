#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "mdhc/errors.hpp"

namespace mdhc {

/// Separating hyperplane {x : vᵀx = b} with unit normal v.
struct Hyperplane {
    Eigen::VectorXd v;
    double b = 0.0;
};

/// Stochastic gradient pair: u is the gradient estimate w.r.t. v,
/// beta the derivative estimate w.r.t. b.
struct GradientSample {
    Eigen::VectorXd u;
    double beta = 0.0;
};

/// Tuning constants for the SGD estimator, with the schedule-exponent
/// admissibility check. Defaults match the reference experimental setup.
struct LearnConfig {
    double C = 10.0;           // penalty weight
    double alpha_factor = 0.1; // alpha = alpha_factor * sigma_hat
    double q = 0.2;            // bandwidth exponent, h ~ t^-q
    double r = 1.0;            // learning-rate exponent, gamma ~ t^-r
    double gbar1_scale = 1.0;  // gamma1 = gbar1_scale * sqrt(d) * t^-r
    double gbar2 = 1.0;        // gamma2 = gbar2 * t^-r
    double eta = 0.2;          // theory constant, used only in the constraint check
    double h_floor = 0.01;     // lower bound on the bandwidth scale
    std::uint64_t seed = 0;

    /// Violated admissibility inequalities, empty when the schedule is valid.
    std::vector<std::string> violations() const;

    /// Throws ConfigError listing every violated inequality.
    void validate() const;
};

/// Hyperplane frozen for this many initial observations at a node while the
/// projected-scale estimate stabilizes; routing and statistics still run.
inline constexpr std::uint64_t kWarmupObservations = 10;

/// Standard univariate Gaussian density (2pi)^{-1/2} exp(-z^2/2).
double gaussian_kernel(double z);

/// Deterministic sub-stream seed derived from a base seed and a stream id.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

/// Unit vector drawn uniformly from the sphere (normalized standard normals).
Eigen::VectorXd random_unit_vector(Eigen::Index dim, std::uint64_t seed);

/// h(t) = max(sigma_hat, h_floor) * t^-q. A NaN or nonpositive sigma_hat
/// (undefined below two observations) falls back to the floor.
double bandwidth(std::uint64_t t, double sigma_hat, const LearnConfig& cfg);

/// (gamma1, gamma2) = (gbar1_scale * sqrt(d) * t^-r, gbar2 * t^-r).
std::pair<double, double> learning_rates(std::uint64_t t, Eigen::Index dim,
                                         const LearnConfig& cfg);

/// Stochastic gradients at a centered observation:
/// beta = (z/h^3) phi(z/h) with z = b - vᵀx, and u = beta * x.
GradientSample stochastic_gradient(const Hyperplane& hp,
                                   const Eigen::Ref<const Eigen::VectorXd>& x_centered,
                                   double h);

/// v' = (v - gamma1 u) / ||v - gamma1 u||. A vanishing norm is a degenerate
/// step: v is left unchanged and *degenerate is set when provided.
Hyperplane update_v(const Hyperplane& hp, const Eigen::Ref<const Eigen::VectorXd>& u,
                    double gamma1, bool* degenerate = nullptr);

/// b' = b + gamma2 (beta - 2C (|b|-alpha)_+ sign(b)), with sign(0) = 0.
Hyperplane update_b(const Hyperplane& hp, double beta, double gamma2, double C,
                    double alpha);

/// One full SGD step: bandwidth, stochastic gradient, then the v and b
/// updates, with beta taken from the pre-update hyperplane.
Hyperplane mdh_step(const Hyperplane& hp,
                    const Eigen::Ref<const Eigen::VectorXd>& x_centered,
                    std::uint64_t t_node, double sigma_hat, const LearnConfig& cfg,
                    bool* degenerate = nullptr);

} // namespace mdhc
