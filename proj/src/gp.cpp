#include "corrattack/gp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "corrattack/errors.hpp"

namespace corrattack::gp {
namespace {

constexpr double kSqrt5 = 2.2360679774997896964;

double scaled_sq_distance(const FeatureVec& a, const FeatureVec& b,
                          const std::array<double, kFeatureDim>& ls) {
    double r2 = 0.0;
    for (int d = 0; d < kFeatureDim; ++d) {
        const double t = (a[d] - b[d]) / ls[d];
        r2 += t * t;
    }
    return r2;
}

double matern52_from_r(double r, double outputscale) {
    const double sr = kSqrt5 * r;
    return outputscale * (1.0 + sr + sr * sr / 3.0) * std::exp(-sr);
}

Eigen::VectorXd centred_targets(const GpHyperparams& hp, const GpDataset& data) {
    Eigen::VectorXd y(static_cast<Eigen::Index>(data.size()));
    for (std::size_t i = 0; i < data.size(); ++i)
        y(static_cast<Eigen::Index>(i)) = data.values()[i] - hp.mean_constant;
    return y;
}

Eigen::MatrixXd noisy_kernel(const GpHyperparams& hp, const GpDataset& data) {
    Eigen::MatrixXd k = kernel_matrix(data.features(), hp);
    k.diagonal().array() += hp.noise_variance;
    return k;
}

}  // namespace

GpHyperparams GpHyperparams::initial() {
    using B = HyperparamBounds;
    GpHyperparams hp;
    hp.lengthscales.fill(std::sqrt(B::kLengthscaleMin * B::kLengthscaleMax));
    hp.outputscale = std::sqrt(B::kOutputscaleMin * B::kOutputscaleMax);
    hp.noise_variance = std::sqrt(B::kNoiseMin * B::kNoiseMax);
    hp.mean_constant = 0.0;
    return hp;
}

void GpHyperparams::clamp_to_bounds() {
    using B = HyperparamBounds;
    for (double& l : lengthscales) l = std::clamp(l, B::kLengthscaleMin, B::kLengthscaleMax);
    outputscale = std::clamp(outputscale, B::kOutputscaleMin, B::kOutputscaleMax);
    noise_variance = std::clamp(noise_variance, B::kNoiseMin, B::kNoiseMax);
}

bool GpHyperparams::within_bounds() const {
    using B = HyperparamBounds;
    for (double l : lengthscales)
        if (!(l >= B::kLengthscaleMin && l <= B::kLengthscaleMax)) return false;
    return outputscale >= B::kOutputscaleMin && outputscale <= B::kOutputscaleMax &&
           noise_variance >= B::kNoiseMin && noise_variance <= B::kNoiseMax &&
           std::isfinite(mean_constant);
}

GpHyperparams::ParamVec GpHyperparams::to_params() const {
    ParamVec p{};
    for (int d = 0; d < kFeatureDim; ++d) p[d] = std::log(lengthscales[d]);
    p[kFeatureDim] = std::log(outputscale);
    p[kFeatureDim + 1] = std::log(noise_variance);
    p[kFeatureDim + 2] = mean_constant;
    return p;
}

GpHyperparams GpHyperparams::from_params(const ParamVec& p) {
    GpHyperparams hp;
    for (int d = 0; d < kFeatureDim; ++d) hp.lengthscales[d] = std::exp(p[d]);
    hp.outputscale = std::exp(p[kFeatureDim]);
    hp.noise_variance = std::exp(p[kFeatureDim + 1]);
    hp.mean_constant = p[kFeatureDim + 2];
    return hp;
}

GpDataset GpDataset::standardize(std::vector<FeatureVec> features, std::span<const double> raw) {
    if (features.size() != raw.size())
        throw std::invalid_argument("GpDataset: feature and value counts differ");
    GpDataset d;
    d.features_ = std::move(features);
    const std::size_t n = raw.size();
    if (n == 0) return d;
    double mean = 0.0;
    for (double v : raw) mean += v;
    mean /= static_cast<double>(n);
    double sd = 1.0;
    if (n >= 2) {
        double ss = 0.0;
        for (double v : raw) ss += (v - mean) * (v - mean);
        sd = std::sqrt(ss / static_cast<double>(n - 1));
        if (!(sd > 1e-12)) sd = 1.0;
    }
    d.raw_mean_ = mean;
    d.raw_std_ = sd;
    d.values_.reserve(n);
    for (double v : raw) d.values_.push_back((v - mean) / sd);
    return d;
}

double matern52_ard(const FeatureVec& z1, const FeatureVec& z2, const GpHyperparams& hp) {
    return matern52_from_r(std::sqrt(scaled_sq_distance(z1, z2, hp.lengthscales)),
                           hp.outputscale);
}

Eigen::MatrixXd kernel_matrix(const std::vector<FeatureVec>& z, const GpHyperparams& hp) {
    const auto n = static_cast<Eigen::Index>(z.size());
    Eigen::MatrixXd k(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        k(i, i) = hp.outputscale;
        for (Eigen::Index j = 0; j < i; ++j) {
            const double v = matern52_ard(z[i], z[j], hp);
            k(i, j) = v;
            k(j, i) = v;
        }
    }
    return k;
}

Eigen::LLT<Eigen::MatrixXd> robust_cholesky(const Eigen::MatrixXd& k) {
    Eigen::LLT<Eigen::MatrixXd> llt(k);
    if (llt.info() == Eigen::Success) return llt;
    double jitter = 1e-8;
    for (int attempt = 0; attempt < 5; ++attempt, jitter *= 10.0) {
        Eigen::MatrixXd kj = k;
        kj.diagonal().array() += jitter;
        llt.compute(kj);
        if (llt.info() == Eigen::Success) return llt;
    }
    throw NumericalFailure("kernel matrix is not positive definite after jitter 1e-4");
}

double log_marginal_likelihood(const GpHyperparams& hp, const GpDataset& data) {
    if (data.empty()) throw std::invalid_argument("log_marginal_likelihood: empty dataset");
    const auto llt = robust_cholesky(noisy_kernel(hp, data));
    const Eigen::VectorXd y = centred_targets(hp, data);
    const Eigen::VectorXd alpha = llt.solve(y);
    const double half_log_det = Eigen::MatrixXd(llt.matrixL()).diagonal().array().log().sum();
    const double n = static_cast<double>(data.size());
    return -0.5 * y.dot(alpha) - half_log_det - 0.5 * n * std::log(2.0 * std::numbers::pi);
}

LmlWithGradient log_marginal_likelihood_with_gradient(const GpHyperparams& hp,
                                                      const GpDataset& data) {
    if (data.empty()) throw std::invalid_argument("log_marginal_likelihood: empty dataset");
    const auto n = static_cast<Eigen::Index>(data.size());
    const Eigen::MatrixXd kf = kernel_matrix(data.features(), hp);
    Eigen::MatrixXd k = kf;
    k.diagonal().array() += hp.noise_variance;
    const auto llt = robust_cholesky(k);

    const Eigen::VectorXd y = centred_targets(hp, data);
    const Eigen::VectorXd alpha = llt.solve(y);
    const Eigen::MatrixXd kinv = llt.solve(Eigen::MatrixXd::Identity(n, n));
    const double half_log_det = Eigen::MatrixXd(llt.matrixL()).diagonal().array().log().sum();

    LmlWithGradient out;
    out.value = -0.5 * y.dot(alpha) - half_log_det -
                0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);

    // d lml / d theta = 0.5 * tr((alpha alpha^T - K^-1) dK/dtheta)
    const Eigen::MatrixXd a = alpha * alpha.transpose() - kinv;
    const auto& z = data.features();
    std::array<double, kFeatureDim> grad_ls{};
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < i; ++j) {
            const double r = std::sqrt(scaled_sq_distance(z[i], z[j], hp.lengthscales));
            const double sr = kSqrt5 * r;
            const double common = (5.0 / 3.0) * hp.outputscale * (1.0 + sr) * std::exp(-sr);
            const double aij = a(i, j);  // symmetric: count (i,j) and (j,i)
            for (int d = 0; d < kFeatureDim; ++d) {
                const double t = (z[i][d] - z[j][d]) / hp.lengthscales[d];
                grad_ls[d] += aij * common * t * t;
            }
        }
    }
    for (int d = 0; d < kFeatureDim; ++d) out.gradient[d] = grad_ls[d];
    out.gradient[kFeatureDim] = 0.5 * (a.array() * kf.array()).sum();
    out.gradient[kFeatureDim + 1] = 0.5 * hp.noise_variance * a.trace();
    out.gradient[kFeatureDim + 2] = alpha.sum();
    return out;
}

GpHyperparams::ParamVec lml_gradient_fd(const GpHyperparams& hp, const GpDataset& data,
                                        double step) {
    const auto base = hp.to_params();
    GpHyperparams::ParamVec g{};
    for (int p = 0; p < GpHyperparams::kParamCount; ++p) {
        auto plus = base;
        auto minus = base;
        plus[p] += step;
        minus[p] -= step;
        g[p] = (log_marginal_likelihood(GpHyperparams::from_params(plus), data) -
                log_marginal_likelihood(GpHyperparams::from_params(minus), data)) /
               (2.0 * step);
    }
    return g;
}

GpHyperparams HyperparamFitter::step(const GpHyperparams& hp, const GpDataset& data) {
    if (data.size() < 2) throw std::invalid_argument("fit_step needs at least two samples");
    return step_with_gradient(hp, log_marginal_likelihood_with_gradient(hp, data).gradient);
}

GpHyperparams HyperparamFitter::step_with_gradient(const GpHyperparams& hp,
                                                   const GpHyperparams::ParamVec& gradient) {
    ++t_;
    auto theta = hp.to_params();
    const double bc1 = 1.0 - std::pow(opts_.beta1, t_);
    const double bc2 = 1.0 - std::pow(opts_.beta2, t_);
    for (int p = 0; p < GpHyperparams::kParamCount; ++p) {
        const double g = gradient[p];
        m_[p] = opts_.beta1 * m_[p] + (1.0 - opts_.beta1) * g;
        v_[p] = opts_.beta2 * v_[p] + (1.0 - opts_.beta2) * g * g;
        const double m_hat = m_[p] / bc1;
        const double v_hat = v_[p] / bc2;
        // ascent: the likelihood is maximised
        theta[p] += opts_.learning_rate * m_hat / (std::sqrt(v_hat) + opts_.epsilon);
    }
    GpHyperparams out = GpHyperparams::from_params(theta);
    out.clamp_to_bounds();
    return out;
}

void HyperparamFitter::reset() {
    m_.fill(0.0);
    v_.fill(0.0);
    t_ = 0;
}

GpHyperparams fit_step(const GpHyperparams& hp, const GpDataset& data) {
    HyperparamFitter fitter;
    return fitter.step(hp, data);
}

GpModel::GpModel(const GpHyperparams& hp, const GpDataset& data)
    : hp_(hp), features_(data.features()) {
    if (!data.empty()) {
        chol_ = robust_cholesky(noisy_kernel(hp, data));
        alpha_ = chol_.solve(centred_targets(hp, data));
    }
}

GpPosterior GpModel::predict(const FeatureVec& z) const {
    return predict(std::span<const FeatureVec>(&z, 1)).front();
}

std::vector<GpPosterior> GpModel::predict(std::span<const FeatureVec> zs) const {
    std::vector<GpPosterior> out(zs.size());
    if (features_.empty()) {
        for (auto& p : out) p = {hp_.mean_constant, hp_.outputscale + hp_.noise_variance};
        return out;
    }
    const auto n = static_cast<Eigen::Index>(features_.size());
    const auto m = static_cast<Eigen::Index>(zs.size());
    Eigen::MatrixXd kstar(n, m);
    for (Eigen::Index c = 0; c < m; ++c)
        for (Eigen::Index r = 0; r < n; ++r)
            kstar(r, c) = matern52_ard(features_[r], zs[c], hp_);
    const Eigen::VectorXd mean = kstar.transpose() * alpha_;
    const Eigen::MatrixXd v = chol_.matrixL().solve(kstar);
    const Eigen::VectorXd explained = v.colwise().squaredNorm().transpose();
    for (Eigen::Index c = 0; c < m; ++c) {
        out[c].mean = hp_.mean_constant + mean(c);
        out[c].variance = std::max(hp_.outputscale - explained(c), kVarianceFloor);
    }
    return out;
}

GpPosterior posterior(const GpHyperparams& hp, const GpDataset& data, const FeatureVec& z) {
    return GpModel(hp, data).predict(z);
}

}  // namespace corrattack::gp
