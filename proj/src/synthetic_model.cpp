#include "corrattack/synthetic_model.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

#include "corrattack/simd/kernels.hpp"

namespace corrattack {
namespace {

void check_shape(const Image& x, const Shape& expected) {
    if (!(x.shape() == expected))
        throw std::invalid_argument("input shape does not match the model");
}

// Per-channel separable Gaussian blur with clamped borders.
std::vector<double> blur(const std::vector<double>& in, const Shape& s, double sigma) {
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> taps(2 * radius + 1);
    double norm = 0.0;
    for (int t = -radius; t <= radius; ++t) {
        taps[t + radius] = std::exp(-0.5 * t * t / (sigma * sigma));
        norm += taps[t + radius];
    }
    for (double& t : taps) t /= norm;

    auto idx = [&](int c, int r, int col) {
        return (static_cast<std::size_t>(c) * s.height + r) * s.width + col;
    };
    std::vector<double> tmp(in.size()), out(in.size());
    for (int c = 0; c < s.channels; ++c)
        for (int r = 0; r < s.height; ++r)
            for (int col = 0; col < s.width; ++col) {
                double acc = 0.0;
                for (int t = -radius; t <= radius; ++t) {
                    const int cc = std::clamp(col + t, 0, s.width - 1);
                    acc += taps[t + radius] * in[idx(c, r, cc)];
                }
                tmp[idx(c, r, col)] = acc;
            }
    for (int c = 0; c < s.channels; ++c)
        for (int r = 0; r < s.height; ++r)
            for (int col = 0; col < s.width; ++col) {
                double acc = 0.0;
                for (int t = -radius; t <= radius; ++t) {
                    const int rr = std::clamp(r + t, 0, s.height - 1);
                    acc += taps[t + radius] * tmp[idx(c, rr, col)];
                }
                out[idx(c, r, col)] = acc;
            }
    return out;
}

// Classes (plus, minus) whose logit difference forms the active hinge term,
// or nullopt when the margin floor is active.
std::optional<std::pair<int, int>> active_pair(std::span<const double> f, const LossSpec& spec) {
    const int n = static_cast<int>(f.size());
    if (spec.kind == LossSpec::Kind::Untargeted) {
        const int y = spec.class_index;
        int other = -1;
        for (int j = 0; j < n; ++j)
            if (j != y && (other < 0 || f[j] > f[other])) other = j;
        if (f[y] - f[other] <= -spec.margin) return std::nullopt;
        return std::make_pair(y, other);
    }
    const int q = spec.class_index;
    const int top = argmax_class(f);
    if (f[top] - f[q] <= -spec.margin || top == q) return std::nullopt;
    return std::make_pair(top, q);
}

}  // namespace

LinearModel::LinearModel(Shape shape, std::vector<std::vector<double>> weights,
                         std::vector<double> bias)
    : shape_(shape), weights_(std::move(weights)), bias_(std::move(bias)) {
    if (weights_.empty() || bias_.size() != weights_.size())
        throw std::invalid_argument("linear model: weight and bias rows differ");
    for (const auto& r : weights_)
        if (r.size() != shape_.size()) throw std::invalid_argument("linear model: row size");
}

LinearModel LinearModel::seeded(Shape shape, std::size_t classes, std::uint64_t seed,
                                double smoothing, double bias_scale, double row_norm) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<std::vector<double>> w(classes, std::vector<double>(shape.size()));
    for (auto& row : w) {
        for (double& v : row) v = normal(rng);
        if (smoothing > 0.0) row = blur(row, shape, smoothing);
        const std::size_t plane = static_cast<std::size_t>(shape.height) * shape.width;
        for (int c = 0; c < shape.channels; ++c) {
            double mean = 0.0;
            for (std::size_t p = 0; p < plane; ++p) mean += row[c * plane + p];
            mean /= static_cast<double>(plane);
            for (std::size_t p = 0; p < plane; ++p) row[c * plane + p] -= mean;
        }
        double ss = 0.0;
        for (double v : row) ss += v * v;
        const double inv = row_norm / std::sqrt(ss);
        for (double& v : row) v *= inv;
    }
    std::vector<double> bias(classes, 0.0);
    if (bias_scale > 0.0)
        for (double& b : bias) b = bias_scale * normal(rng);
    return LinearModel(shape, std::move(w), std::move(bias));
}

std::vector<double> LinearModel::logits(const Image& x) const {
    check_shape(x, shape_);
    const auto& k = simd::active();
    std::vector<double> out(weights_.size());
    for (std::size_t c = 0; c < weights_.size(); ++c)
        out[c] = k.dot(weights_[c].data(), x.pixels().data(), x.size()) + bias_[c];
    return out;
}

Image LinearModel::loss_gradient(const Image& x, const LossSpec& spec) const {
    Image g(shape_, 0.0);
    const auto pair = active_pair(logits(x), spec);
    if (!pair) return g;
    const auto& plus = weights_[pair->first];
    const auto& minus = weights_[pair->second];
    auto px = g.pixels();
    for (std::size_t i = 0; i < px.size(); ++i) px[i] = plus[i] - minus[i];
    return g;
}

Mlp2Model Mlp2Model::seeded(Shape shape, std::size_t classes, std::size_t hidden,
                            std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Mlp2Model m;
    m.shape_ = shape;
    const double s1 = 1.0 / std::sqrt(static_cast<double>(shape.size()));
    const double s2 = 1.0 / std::sqrt(static_cast<double>(hidden));
    m.w1_.assign(hidden, std::vector<double>(shape.size()));
    for (auto& row : m.w1_)
        for (double& v : row) v = normal(rng) * s1;
    m.b1_.resize(hidden);
    for (double& v : m.b1_) v = 0.1 * normal(rng);
    m.w2_.assign(classes, std::vector<double>(hidden));
    for (auto& row : m.w2_)
        for (double& v : row) v = normal(rng) * s2;
    m.b2_.assign(classes, 0.0);
    return m;
}

std::vector<double> Mlp2Model::hidden(const Image& x) const {
    check_shape(x, shape_);
    const auto& k = simd::active();
    std::vector<double> h(w1_.size());
    for (std::size_t u = 0; u < w1_.size(); ++u)
        h[u] = k.dot(w1_[u].data(), x.pixels().data(), x.size()) + b1_[u];
    return h;
}

std::vector<double> Mlp2Model::logits(const Image& x) const {
    std::vector<double> h = hidden(x);
    for (double& v : h) v = std::max(v, 0.0);
    const auto& k = simd::active();
    std::vector<double> out(w2_.size());
    for (std::size_t c = 0; c < w2_.size(); ++c)
        out[c] = k.dot(w2_[c].data(), h.data(), h.size()) + b2_[c];
    return out;
}

Image Mlp2Model::loss_gradient(const Image& x, const LossSpec& spec) const {
    Image g(shape_, 0.0);
    const auto pair = active_pair(logits(x), spec);
    if (!pair) return g;
    const std::vector<double> pre = hidden(x);
    const auto& k = simd::active();
    auto px = g.pixels();
    for (std::size_t u = 0; u < w1_.size(); ++u) {
        if (pre[u] <= 0.0) continue;
        const double coeff = w2_[pair->first][u] - w2_[pair->second][u];
        k.axpy(coeff, w1_[u].data(), px.data(), px.size());
    }
    return g;
}

std::vector<double> SyntheticOracle::compute_logits(const Image& x) {
    return model_->logits(x);
}

std::shared_ptr<const SyntheticModel> make_synthetic_model(const SyntheticModelOptions& o) {
    if (o.kind == "linear")
        return std::make_shared<LinearModel>(
            LinearModel::seeded(o.shape, o.classes, o.seed, o.smoothing, o.bias_scale, o.row_norm));
    if (o.kind == "mlp")
        return std::make_shared<Mlp2Model>(Mlp2Model::seeded(o.shape, o.classes, o.hidden, o.seed));
    throw std::invalid_argument("unknown synthetic model '" + o.kind + "'");
}

}  // namespace corrattack
