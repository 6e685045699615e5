#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace corrattack::gp {

inline constexpr int kFeatureDim = 4;
using FeatureVec = std::array<double, kFeatureDim>;

/// Box constraints on the kernel hyperparameters.
struct HyperparamBounds {
    static constexpr double kLengthscaleMin = 0.005;
    static constexpr double kLengthscaleMax = 2.0;
    static constexpr double kOutputscaleMin = 0.05;
    static constexpr double kOutputscaleMax = 20.0;
    static constexpr double kNoiseMin = 0.0005;
    static constexpr double kNoiseMax = 0.1;
};

/// Matern-5/2 ARD kernel parameters plus the constant prior mean.
struct GpHyperparams {
    std::array<double, kFeatureDim> lengthscales{};
    double outputscale = 1.0;
    double noise_variance = 0.0;
    double mean_constant = 0.0;

    // Geometric mean of each bound interval.
    static GpHyperparams initial();

    void clamp_to_bounds();
    bool within_bounds() const;

    // Optimisation coordinates: log lengthscales (4), log outputscale,
    // log noise, raw mean constant.
    static constexpr int kParamCount = kFeatureDim + 3;
    using ParamVec = std::array<double, kParamCount>;
    ParamVec to_params() const;
    static GpHyperparams from_params(const ParamVec& p);
};

/// Training data: features in [0,1]^4 and standardized targets.
class GpDataset {
public:
    GpDataset() = default;

    /// Standardizes raw values with the sample mean and (n-1) standard
    /// deviation. One point, or a zero spread, uses std = 1.
    static GpDataset standardize(std::vector<FeatureVec> features, std::span<const double> raw);

    std::size_t size() const noexcept { return values_.size(); }
    bool empty() const noexcept { return values_.empty(); }
    const std::vector<FeatureVec>& features() const noexcept { return features_; }
    const std::vector<double>& values() const noexcept { return values_; }
    double raw_mean() const noexcept { return raw_mean_; }
    double raw_std() const noexcept { return raw_std_; }

    double to_standard(double raw) const noexcept { return (raw - raw_mean_) / raw_std_; }
    double to_raw(double standard) const noexcept { return standard * raw_std_ + raw_mean_; }

private:
    std::vector<FeatureVec> features_;
    std::vector<double> values_;
    double raw_mean_ = 0.0;
    double raw_std_ = 1.0;
};

struct GpPosterior {
    double mean = 0.0;      // standardized units
    double variance = 0.0;  // standardized units, >= kVarianceFloor

    double raw_mean(const GpDataset& d) const noexcept { return d.to_raw(mean); }
    double raw_variance(const GpDataset& d) const noexcept {
        return variance * d.raw_std() * d.raw_std();
    }
};

inline constexpr double kVarianceFloor = 1e-12;

double matern52_ard(const FeatureVec& z1, const FeatureVec& z2, const GpHyperparams& hp);

Eigen::MatrixXd kernel_matrix(const std::vector<FeatureVec>& z, const GpHyperparams& hp);

/// Cholesky of a symmetric matrix with the fixed jitter schedule: no jitter,
/// then 1e-8, 1e-7, ..., 1e-4 on the diagonal. Throws NumericalFailure when
/// every attempt fails.
Eigen::LLT<Eigen::MatrixXd> robust_cholesky(const Eigen::MatrixXd& k);

double log_marginal_likelihood(const GpHyperparams& hp, const GpDataset& data);

struct LmlWithGradient {
    double value = 0.0;
    GpHyperparams::ParamVec gradient{};  // w.r.t. GpHyperparams::to_params()
};

/// Log-marginal likelihood and its analytic gradient in optimisation
/// coordinates.
LmlWithGradient log_marginal_likelihood_with_gradient(const GpHyperparams& hp,
                                                      const GpDataset& data);

/// Central finite-difference gradient of the log-marginal likelihood.
GpHyperparams::ParamVec lml_gradient_fd(const GpHyperparams& hp, const GpDataset& data,
                                        double step = 1e-4);

/// Adam ascent on the log-marginal likelihood, one step per call. Moment
/// state lives in the object; reset() starts a fresh optimiser.
class HyperparamFitter {
public:
    struct Options {
        double learning_rate = 0.1;
        double beta1 = 0.9;
        double beta2 = 0.999;
        double epsilon = 1e-8;
    };

    HyperparamFitter() = default;
    explicit HyperparamFitter(Options opts) : opts_(opts) {}

    /// Requires data.size() >= 2. The returned parameters are clamped.
    GpHyperparams step(const GpHyperparams& hp, const GpDataset& data);

    /// Same update with a caller-provided gradient (used by tests).
    GpHyperparams step_with_gradient(const GpHyperparams& hp,
                                     const GpHyperparams::ParamVec& gradient);

    void reset();
    int steps_taken() const noexcept { return t_; }
    const Options& options() const noexcept { return opts_; }

private:
    Options opts_{};
    GpHyperparams::ParamVec m_{};
    GpHyperparams::ParamVec v_{};
    int t_ = 0;
};

/// Convenience: one step from a fresh optimiser.
GpHyperparams fit_step(const GpHyperparams& hp, const GpDataset& data);

/// Exact GP posterior with the kernel matrix factorized once.
class GpModel {
public:
    GpModel(const GpHyperparams& hp, const GpDataset& data);

    GpPosterior predict(const FeatureVec& z) const;
    std::vector<GpPosterior> predict(std::span<const FeatureVec> zs) const;

    const GpHyperparams& hyperparams() const noexcept { return hp_; }

private:
    GpHyperparams hp_;
    std::vector<FeatureVec> features_;
    Eigen::LLT<Eigen::MatrixXd> chol_;
    Eigen::VectorXd alpha_;  // K^-1 (y - m)
};

GpPosterior posterior(const GpHyperparams& hp, const GpDataset& data, const FeatureVec& z);

}  // namespace corrattack::gp
