#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

#include <Eigen/Core>

#include "mdhc/errors.hpp"

namespace mdhc {

/// Running arithmetic mean of d-dimensional observations.
class MeanAccumulator {
public:
    explicit MeanAccumulator(Eigen::Index dim) : mean_(Eigen::VectorXd::Zero(dim)) {}

    void update(const Eigen::Ref<const Eigen::VectorXd>& x) {
        if (x.size() != mean_.size())
            throw DimensionError("MeanAccumulator: expected dimension " +
                                 std::to_string(mean_.size()) + ", got " +
                                 std::to_string(x.size()));
        ++count_;
        mean_ += (x - mean_) / static_cast<double>(count_);
    }

    std::uint64_t count() const noexcept { return count_; }
    const Eigen::VectorXd& mean() const noexcept { return mean_; }
    Eigen::Index dim() const noexcept { return mean_.size(); }

    void restore(std::uint64_t count, Eigen::VectorXd mean) {
        count_ = count;
        mean_ = std::move(mean);
    }

private:
    std::uint64_t count_ = 0;
    Eigen::VectorXd mean_;
};

/// Welford single-pass mean and sum of squared deviations for a scalar stream.
class ScalarMoments {
public:
    void update(double p) {
        ++count_;
        double delta = p - mean_;
        mean_ += delta / static_cast<double>(count_);
        m2_ += delta * (p - mean_);
    }

    std::uint64_t count() const noexcept { return count_; }
    double mean() const noexcept { return mean_; }
    double m2() const noexcept { return m2_; }

    double variance() const noexcept {
        if (count_ < 2) return std::numeric_limits<double>::quiet_NaN();
        return m2_ / static_cast<double>(count_);
    }

    /// Population standard deviation; NaN sentinel below two observations
    /// (callers fall back to the bandwidth floor).
    double stddev() const noexcept { return std::sqrt(variance()); }

    void restore(std::uint64_t count, double mean, double m2) noexcept {
        count_ = count;
        mean_ = mean;
        m2_ = m2;
    }

private:
    std::uint64_t count_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

/// Within-node sum of squares Σ‖x_i − x̄‖² about the running mean,
/// maintained in one pass. Equals the batch value about the final mean.
class SumSquaresAccumulator {
public:
    explicit SumSquaresAccumulator(Eigen::Index dim) : mean_(Eigen::VectorXd::Zero(dim)) {}

    void update(const Eigen::Ref<const Eigen::VectorXd>& x) {
        if (x.size() != mean_.size())
            throw DimensionError("SumSquaresAccumulator: expected dimension " +
                                 std::to_string(mean_.size()) + ", got " +
                                 std::to_string(x.size()));
        double n = static_cast<double>(count_);
        ss_ += n / (n + 1.0) * (x - mean_).squaredNorm();
        ++count_;
        mean_ += (x - mean_) / static_cast<double>(count_);
    }

    std::uint64_t count() const noexcept { return count_; }
    const Eigen::VectorXd& mean() const noexcept { return mean_; }
    double ss() const noexcept { return ss_; }

    void restore(std::uint64_t count, Eigen::VectorXd mean, double ss) {
        count_ = count;
        mean_ = std::move(mean);
        ss_ = ss;
    }

private:
    std::uint64_t count_ = 0;
    Eigen::VectorXd mean_;
    double ss_ = 0.0;
};

} // namespace mdhc
