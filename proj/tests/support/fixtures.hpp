#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "corrattack/bandit.hpp"
#include "corrattack/image.hpp"
#include "corrattack/loss.hpp"
#include "corrattack/stage.hpp"
#include "corrattack/synthetic_model.hpp"

namespace fixtures {

inline corrattack::Image noise_image(corrattack::Shape shape, std::uint64_t seed, double lo = 0.0,
                                     double hi = 1.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(lo, hi);
    corrattack::Image x(shape);
    for (double& p : x.pixels()) p = u(rng);
    return x;
}

/// Always answers the same logits.
class FixedLogits final : public corrattack::LogitsOracle {
public:
    explicit FixedLogits(std::vector<double> logits) : logits_(std::move(logits)) {}
    std::size_t num_classes() override { return logits_.size(); }

protected:
    std::vector<double> compute_logits(const corrattack::Image&) override { return logits_; }

private:
    std::vector<double> logits_;
};

inline std::shared_ptr<const corrattack::SyntheticModel> linear_model(
    corrattack::Shape shape = corrattack::kBenchmarkShape, std::uint64_t seed = 42,
    std::size_t classes = 10) {
    return std::make_shared<corrattack::LinearModel>(
        corrattack::LinearModel::seeded(shape, classes, seed));
}

/// Flip environment over a live image: evaluation spends oracle queries,
/// acceptance commits the last candidate.
class FlipEnvironment final : public corrattack::BanditEnvironment {
public:
    FlipEnvironment(corrattack::LossOracle& oracle, corrattack::Image origin,
                    corrattack::Image start, corrattack::BlockGrid grid, double epsilon,
                    std::vector<corrattack::ActionSpec> actions)
        : oracle_(oracle),
          origin_(std::move(origin)),
          x_(std::move(start)),
          grid_(grid),
          epsilon_(epsilon),
          actions_(std::move(actions)) {
        loss_ = oracle_.evaluate(x_).loss;
    }

    corrattack::StageEvaluation evaluate(std::size_t a) override {
        last_ = corrattack::evaluate_difference(oracle_, x_, loss_, origin_, epsilon_, grid_,
                                                actions_[a]);
        return {last_.g, last_.success};
    }
    void accept(std::size_t) override {
        x_ = last_.candidate;
        loss_ = last_.candidate_loss;
    }

    const corrattack::Image& image() const { return x_; }
    double loss() const { return loss_; }

private:
    corrattack::LossOracle& oracle_;
    corrattack::Image origin_;
    corrattack::Image x_;
    corrattack::BlockGrid grid_;
    double epsilon_;
    std::vector<corrattack::ActionSpec> actions_;
    corrattack::DifferenceResult last_;
    double loss_ = 0.0;
};

/// Frozen per-action values; acceptance has no effect.
class TableEnvironment final : public corrattack::BanditEnvironment {
public:
    explicit TableEnvironment(std::vector<double> g) : g_(std::move(g)) {}
    corrattack::StageEvaluation evaluate(std::size_t a) override {
        ++evaluations;
        return {g_[a], false};
    }
    void accept(std::size_t) override { ++accepts; }

    int evaluations = 0;
    int accepts = 0;

private:
    std::vector<double> g_;
};

/// Fresh directory under the system temp path, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() /
                ("corrattack_" + tag + "_" + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }
    std::string str() const { return path_.string(); }

private:
    std::filesystem::path path_;
};

}  // namespace fixtures
