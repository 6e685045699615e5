#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "corrattack/image.hpp"
#include "corrattack/loss.hpp"

namespace corrattack {

/// Deterministic in-process classifier used as a desk-scale target. The
/// gradient accessor exists for test oracles only; the attack never sees it.
class SyntheticModel {
public:
    virtual ~SyntheticModel() = default;

    virtual std::vector<double> logits(const Image& x) const = 0;
    /// Gradient of the given hinge loss w.r.t. the input pixels. Zero where
    /// the margin floor is active.
    virtual Image loss_gradient(const Image& x, const LossSpec& spec) const = 0;

    virtual std::size_t num_classes() const = 0;
    virtual Shape input_shape() const = 0;
};

/// F(x) = W x + b over the flattened pixels.
class LinearModel final : public SyntheticModel {
public:
    LinearModel(Shape shape, std::vector<std::vector<double>> weights, std::vector<double> bias);

    /// Unit-normal weights from the given seed, optionally blurred with a
    /// per-channel Gaussian of `smoothing` pixels, centred per channel, each
    /// row scaled to norm `row_norm`. Biases are N(0, bias_scale^2), drawn
    /// after the weights.
    static LinearModel seeded(Shape shape, std::size_t classes, std::uint64_t seed,
                              double smoothing = 0.0, double bias_scale = 0.0,
                              double row_norm = 1.0);

    std::vector<double> logits(const Image& x) const override;
    Image loss_gradient(const Image& x, const LossSpec& spec) const override;
    std::size_t num_classes() const override { return weights_.size(); }
    Shape input_shape() const override { return shape_; }

    const std::vector<double>& row(std::size_t c) const { return weights_[c]; }
    const std::vector<double>& bias() const { return bias_; }

private:
    Shape shape_;
    std::vector<std::vector<double>> weights_;
    std::vector<double> bias_;
};

/// F(x) = W2 max(W1 x + b1, 0) + b2.
class Mlp2Model final : public SyntheticModel {
public:
    static Mlp2Model seeded(Shape shape, std::size_t classes, std::size_t hidden,
                            std::uint64_t seed);

    std::vector<double> logits(const Image& x) const override;
    Image loss_gradient(const Image& x, const LossSpec& spec) const override;
    std::size_t num_classes() const override { return w2_.size(); }
    Shape input_shape() const override { return shape_; }

private:
    std::vector<double> hidden(const Image& x) const;

    Shape shape_;
    std::vector<std::vector<double>> w1_;
    std::vector<double> b1_;
    std::vector<std::vector<double>> w2_;
    std::vector<double> b2_;
};

/// Oracle backed by a shared, immutable synthetic model. Each instance owns
/// its own query counter.
class SyntheticOracle final : public LogitsOracle {
public:
    explicit SyntheticOracle(std::shared_ptr<const SyntheticModel> model)
        : model_(std::move(model)) {}

    std::size_t num_classes() override { return model_->num_classes(); }
    const SyntheticModel& model() const { return *model_; }

protected:
    std::vector<double> compute_logits(const Image& x) override;

private:
    std::shared_ptr<const SyntheticModel> model_;
};

inline constexpr Shape kBenchmarkShape{3, 32, 32};
inline constexpr std::size_t kBenchmarkClasses = 10;
inline constexpr std::uint64_t kBenchmarkModelSeed = 42;

struct SyntheticModelOptions {
    std::string kind = "linear";  // "linear" or "mlp"
    Shape shape = kBenchmarkShape;
    std::size_t classes = kBenchmarkClasses;
    std::uint64_t seed = kBenchmarkModelSeed;
    double smoothing = 0.0;   // linear only
    double bias_scale = 0.0;  // linear only
    double row_norm = 1.0;    // linear only
    std::size_t hidden = 64;  // mlp only
};

std::shared_ptr<const SyntheticModel> make_synthetic_model(const SyntheticModelOptions& options);

}  // namespace corrattack
