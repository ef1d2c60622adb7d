#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "mdhc/errors.hpp"
#include "mdhc/optimizer.hpp"

namespace mdhc {

/// Residual of the constrained stationarity conditions at (v, b):
/// the tangent-projected gradient norm and the absolute b-derivative of the
/// penalized objective. Both vanish exactly at a constrained stationary point.
struct StationarityResidual {
    double grad_v_tangent_norm = 0.0;
    double grad_b_abs = 0.0;
};

/// Finite Gaussian mixture ground truth with closed-form projected density,
/// its gradients, the penalized objective, and exact sampling.
class GaussianMixture {
public:
    GaussianMixture(std::vector<double> weights, std::vector<Eigen::VectorXd> means,
                    std::vector<Eigen::MatrixXd> covariances);

    /// Reads the JSON mixture specification (weights, means, covariance matrices
    /// as nested row lists).
    static GaussianMixture load(const std::string& path);

    Eigen::Index dim() const noexcept { return means_.empty() ? 0 : means_[0].size(); }
    int components() const noexcept { return static_cast<int>(weights_.size()); }
    const std::vector<double>& weights() const noexcept { return weights_; }
    const std::vector<Eigen::VectorXd>& means() const noexcept { return means_; }
    const std::vector<Eigen::MatrixXd>& covariances() const noexcept { return covariances_; }

    /// Mixture mean Σ pi_k mu_k (exact).
    Eigen::VectorXd mean() const;

    /// n i.i.d. draws, one per row; optional per-draw component labels.
    Eigen::MatrixXd sample(std::int64_t n, std::uint64_t seed,
                           std::vector<int>* labels = nullptr) const;

    /// Density of vᵀX at b: Σ pi_k N(b; vᵀmu_k, vᵀΣ_k v).
    double proj_density(const Eigen::Ref<const Eigen::VectorXd>& v, double b) const;

    /// Gradient of the projected density w.r.t. v (closed form).
    Eigen::VectorXd proj_density_grad_v(const Eigen::Ref<const Eigen::VectorXd>& v,
                                        double b) const;

    /// Derivative of the projected density w.r.t. b (closed form).
    double proj_density_db(const Eigen::Ref<const Eigen::VectorXd>& v, double b) const;

    /// Penalized objective: proj_density + C (|b - vᵀmu| - alpha)_+^2.
    double objective(const Eigen::Ref<const Eigen::VectorXd>& v, double b, double C,
                     double alpha) const;

    StationarityResidual stationarity_residual(const Hyperplane& hp, double C,
                                               double alpha) const;

private:
    std::vector<double> weights_;
    std::vector<Eigen::VectorXd> means_;
    std::vector<Eigen::MatrixXd> covariances_;
    std::vector<Eigen::MatrixXd> chol_; // lower Cholesky factors
};

} // namespace mdhc
