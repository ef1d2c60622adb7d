#include "mdhc/optimizer.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace mdhc {

namespace {
constexpr double kInvSqrt2Pi = 0.3989422804014326779;
}

std::vector<std::string> LearnConfig::violations() const {
    std::vector<std::string> out;
    auto require = [&out](bool ok, const char* ineq) {
        if (!ok) out.emplace_back(ineq);
    };
    require(r > 0.0 && r <= 1.0, "0 < r <= 1");
    require(r + 2.0 * q > 1.0, "r + 2q > 1");
    require(r - q > 0.5, "r - q > 0.5");
    require(r + eta > 1.0, "r + eta > 1");
    require(q >= eta, "q >= eta");
    require(r - eta / 2.0 > 0.5, "r - eta/2 > 0.5");
    require(q > 0.0 && q < 1.0, "0 < q < 1");
    require(eta > 0.0 && eta <= 0.2, "0 < eta <= 0.2");
    require(C >= 0.0, "C >= 0");
    require(alpha_factor >= 0.0, "alpha_factor >= 0");
    require(gbar1_scale > 0.0, "gbar1_scale > 0");
    require(gbar2 > 0.0, "gbar2 > 0");
    require(h_floor > 0.0, "h_floor > 0");
    return out;
}

void LearnConfig::validate() const {
    auto v = violations();
    if (v.empty()) return;
    std::ostringstream msg;
    msg << "inadmissible schedule configuration, violated:";
    for (const auto& s : v) msg << " [" << s << "]";
    throw ConfigError(msg.str());
}

double gaussian_kernel(double z) {
    return kInvSqrt2Pi * std::exp(-0.5 * z * z);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    // splitmix64 finalizer over the combined value
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ull * (stream + 1);
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ull;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebull;
    z ^= z >> 31;
    return z;
}

Eigen::VectorXd random_unit_vector(Eigen::Index dim, std::uint64_t seed) {
    if (dim < 1) throw InvalidArgumentError("random_unit_vector: dim must be >= 1");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXd v(dim);
    double norm = 0.0;
    do {
        for (Eigen::Index i = 0; i < dim; ++i) v[i] = normal(rng);
        norm = v.norm();
    } while (norm < 1e-12);
    return v / norm;
}

double bandwidth(std::uint64_t t, double sigma_hat, const LearnConfig& cfg) {
    if (t == 0) throw InvalidArgumentError("bandwidth: t must be >= 1");
    double scale = cfg.h_floor;
    if (std::isfinite(sigma_hat) && sigma_hat > scale) scale = sigma_hat;
    return scale * std::pow(static_cast<double>(t), -cfg.q);
}

std::pair<double, double> learning_rates(std::uint64_t t, Eigen::Index dim,
                                         const LearnConfig& cfg) {
    if (t == 0) throw InvalidArgumentError("learning_rates: t must be >= 1");
    double tr = std::pow(static_cast<double>(t), -cfg.r);
    return {cfg.gbar1_scale * std::sqrt(static_cast<double>(dim)) * tr, cfg.gbar2 * tr};
}

GradientSample stochastic_gradient(const Hyperplane& hp,
                                   const Eigen::Ref<const Eigen::VectorXd>& x_centered,
                                   double h) {
    if (x_centered.size() != hp.v.size())
        throw DimensionError("stochastic_gradient: dimension mismatch");
    double z = hp.b - hp.v.dot(x_centered);
    double beta = z / (h * h * h) * gaussian_kernel(z / h);
    GradientSample g;
    g.beta = beta;
    g.u = beta * x_centered;
    return g;
}

Hyperplane update_v(const Hyperplane& hp, const Eigen::Ref<const Eigen::VectorXd>& u,
                    double gamma1, bool* degenerate) {
    Eigen::VectorXd w = hp.v - gamma1 * u;
    double norm = w.norm();
    if (norm == 0.0) {
        if (degenerate) *degenerate = true;
        return hp;
    }
    return Hyperplane{w / norm, hp.b};
}

Hyperplane update_b(const Hyperplane& hp, double beta, double gamma2, double C,
                    double alpha) {
    double sign_b = hp.b > 0.0 ? 1.0 : (hp.b < 0.0 ? -1.0 : 0.0);
    double penalty = 2.0 * C * std::max(std::abs(hp.b) - alpha, 0.0) * sign_b;
    return Hyperplane{hp.v, hp.b + gamma2 * (beta - penalty)};
}

Hyperplane mdh_step(const Hyperplane& hp,
                    const Eigen::Ref<const Eigen::VectorXd>& x_centered,
                    std::uint64_t t_node, double sigma_hat, const LearnConfig& cfg,
                    bool* degenerate) {
    double h = bandwidth(t_node, sigma_hat, cfg);
    double sigma = (std::isfinite(sigma_hat) && sigma_hat > 0.0) ? sigma_hat : 0.0;
    double alpha = cfg.alpha_factor * sigma;
    auto [gamma1, gamma2] = learning_rates(t_node, x_centered.size(), cfg);
    GradientSample g = stochastic_gradient(hp, x_centered, h);
    Hyperplane next = update_v(hp, g.u, gamma1, degenerate);
    return update_b(next, g.beta, gamma2, cfg.C, alpha);
}

} // namespace mdhc
