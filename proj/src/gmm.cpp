#include "mdhc/gmm.hpp"

#include <cmath>
#include <fstream>
#include <random>

#include <Eigen/Cholesky>
#include <json.hpp>

namespace mdhc {

namespace {
constexpr double kInvSqrt2Pi = 0.3989422804014326779;
}

GaussianMixture::GaussianMixture(std::vector<double> weights,
                                 std::vector<Eigen::VectorXd> means,
                                 std::vector<Eigen::MatrixXd> covariances)
    : weights_(std::move(weights)), means_(std::move(means)),
      covariances_(std::move(covariances)) {
    if (weights_.empty() || weights_.size() != means_.size() ||
        weights_.size() != covariances_.size())
        throw ConfigError("mixture: weights, means and covariances must have equal, "
                          "nonzero length");
    Eigen::Index d = means_[0].size();
    if (d < 1) throw ConfigError("mixture: dimension must be >= 1");
    double wsum = 0.0;
    for (double w : weights_) {
        if (w <= 0.0) throw ConfigError("mixture: weights must be positive");
        wsum += w;
    }
    if (std::abs(wsum - 1.0) > 1e-12)
        throw ConfigError("mixture: weights must sum to 1 (got " + std::to_string(wsum) + ")");
    chol_.reserve(weights_.size());
    for (std::size_t k = 0; k < weights_.size(); ++k) {
        if (means_[k].size() != d)
            throw ConfigError("mixture: inconsistent mean dimensions");
        const Eigen::MatrixXd& S = covariances_[k];
        if (S.rows() != d || S.cols() != d)
            throw ConfigError("mixture: covariance " + std::to_string(k) +
                              " has wrong shape");
        if ((S - S.transpose()).cwiseAbs().maxCoeff() > 1e-12)
            throw ConfigError("mixture: covariance " + std::to_string(k) +
                              " is not symmetric");
        Eigen::LLT<Eigen::MatrixXd> llt(S);
        if (llt.info() != Eigen::Success)
            throw ConfigError("mixture: covariance " + std::to_string(k) +
                              " is not positive definite");
        chol_.push_back(llt.matrixL());
    }
}

GaussianMixture GaussianMixture::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open mixture spec: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("mixture spec " + path + ": " + e.what());
    }
    try {
        std::vector<double> weights = j.at("weights").get<std::vector<double>>();
        auto means_raw = j.at("means").get<std::vector<std::vector<double>>>();
        auto covs_raw =
            j.at("covariances").get<std::vector<std::vector<std::vector<double>>>>();
        std::vector<Eigen::VectorXd> means;
        std::vector<Eigen::MatrixXd> covs;
        for (const auto& m : means_raw)
            means.push_back(Eigen::Map<const Eigen::VectorXd>(m.data(),
                                static_cast<Eigen::Index>(m.size())));
        for (std::size_t k = 0; k < covs_raw.size(); ++k) {
            Eigen::Index d = means.empty() ? 0 : means[0].size();
            const auto& rows = covs_raw[k];
            if (static_cast<Eigen::Index>(rows.size()) != d)
                throw ConfigError("mixture spec: covariance " + std::to_string(k) +
                                  " must be a d*d matrix (list of d rows)");
            Eigen::MatrixXd S(d, d);
            for (Eigen::Index i = 0; i < d; ++i) {
                if (static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)].size()) != d)
                    throw ConfigError("mixture spec: covariance " + std::to_string(k) +
                                      " row " + std::to_string(i) + " must have d entries");
                for (Eigen::Index c = 0; c < d; ++c)
                    S(i, c) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)];
            }
            covs.push_back(std::move(S));
        }
        return GaussianMixture(std::move(weights), std::move(means), std::move(covs));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("mixture spec " + path + ": " + e.what());
    }
}

Eigen::VectorXd GaussianMixture::mean() const {
    Eigen::VectorXd mu = Eigen::VectorXd::Zero(dim());
    for (std::size_t k = 0; k < weights_.size(); ++k) mu += weights_[k] * means_[k];
    return mu;
}

Eigen::MatrixXd GaussianMixture::sample(std::int64_t n, std::uint64_t seed,
                                        std::vector<int>* labels) const {
    if (n < 0) throw InvalidArgumentError("sample: n must be >= 0");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::Index d = dim();
    Eigen::MatrixXd out(n, d);
    if (labels) {
        labels->clear();
        labels->reserve(static_cast<std::size_t>(n));
    }
    Eigen::VectorXd z(d);
    for (std::int64_t i = 0; i < n; ++i) {
        double udraw = unif(rng);
        std::size_t k = 0;
        double cum = weights_[0];
        while (udraw > cum && k + 1 < weights_.size()) cum += weights_[++k];
        for (Eigen::Index j = 0; j < d; ++j) z[j] = normal(rng);
        out.row(i) = (means_[k] + chol_[k] * z).transpose();
        if (labels) labels->push_back(static_cast<int>(k));
    }
    return out;
}

double GaussianMixture::proj_density(const Eigen::Ref<const Eigen::VectorXd>& v,
                                     double b) const {
    double f = 0.0;
    for (std::size_t k = 0; k < weights_.size(); ++k) {
        double s2 = v.dot(covariances_[k] * v);
        double zm = b - v.dot(means_[k]);
        f += weights_[k] * kInvSqrt2Pi / std::sqrt(s2) * std::exp(-zm * zm / (2.0 * s2));
    }
    return f;
}

Eigen::VectorXd GaussianMixture::proj_density_grad_v(
    const Eigen::Ref<const Eigen::VectorXd>& v, double b) const {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(v.size());
    for (std::size_t k = 0; k < weights_.size(); ++k) {
        Eigen::VectorXd Sv = covariances_[k] * v;
        double s2 = v.dot(Sv);
        double zm = b - v.dot(means_[k]);
        double scale = kInvSqrt2Pi * std::pow(s2, -1.5) * std::exp(-zm * zm / (2.0 * s2));
        g += weights_[k] * scale * (zm * means_[k] + (zm * zm / s2 - 1.0) * Sv);
    }
    return g;
}

double GaussianMixture::proj_density_db(const Eigen::Ref<const Eigen::VectorXd>& v,
                                        double b) const {
    double g = 0.0;
    for (std::size_t k = 0; k < weights_.size(); ++k) {
        double s2 = v.dot(covariances_[k] * v);
        double zm = b - v.dot(means_[k]);
        g += weights_[k] * kInvSqrt2Pi * std::pow(s2, -1.5) *
             std::exp(-zm * zm / (2.0 * s2)) * (-zm);
    }
    return g;
}

double GaussianMixture::objective(const Eigen::Ref<const Eigen::VectorXd>& v, double b,
                                  double C, double alpha) const {
    double excess = std::max(std::abs(b - v.dot(mean())) - alpha, 0.0);
    return proj_density(v, b) + C * excess * excess;
}

StationarityResidual GaussianMixture::stationarity_residual(const Hyperplane& hp,
                                                            double C,
                                                            double alpha) const {
    StationarityResidual res;
    Eigen::VectorXd grad = proj_density_grad_v(hp.v, hp.b);
    res.grad_v_tangent_norm = (grad - hp.v * hp.v.dot(grad)).norm();
    double centered_b = hp.b - hp.v.dot(mean());
    double sign = centered_b > 0.0 ? 1.0 : (centered_b < 0.0 ? -1.0 : 0.0);
    double penalty_db = 2.0 * C * std::max(std::abs(centered_b) - alpha, 0.0) * sign;
    res.grad_b_abs = std::abs(proj_density_db(hp.v, hp.b) + penalty_db);
    return res;
}

} // namespace mdhc
