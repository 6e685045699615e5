#pragma once

#include <cstddef>
#include <functional>
#include <utility>
#include <optional>
#include <span>
#include <vector>

#include "corrattack/image.hpp"

namespace corrattack {

/// max{F_y - max_{j != y} F_j, -margin}. Needs at least two classes.
double hinge_untargeted(std::span<const double> logits, int label, double margin);

/// max{max_j F_j - F_q, -margin}.
double hinge_targeted(std::span<const double> logits, int target, double margin);

/// Index of the largest logit; ties go to the lowest index.
int argmax_class(std::span<const double> logits);

struct LossSpec {
    enum class Kind { Untargeted, Targeted };

    Kind kind = Kind::Untargeted;
    int class_index = 0;  // true label, or target class when targeted
    double margin = 0.05;

    static LossSpec untargeted(int label, double margin) {
        return {Kind::Untargeted, label, margin};
    }
    static LossSpec targeted(int target, double margin) { return {Kind::Targeted, target, margin}; }

    double loss(std::span<const double> logits) const;
    bool success(std::span<const double> logits) const;
};

/// Un-targeted: argmax != y. Targeted: argmax == q.
bool check_success(std::span<const double> logits, const LossSpec& spec);

/// Query interface to a classifier. Every answered query increments the
/// counter by one; once a budget is installed, the attempt after the last
/// allowed query throws BudgetExhausted before the model is contacted.
class LogitsOracle {
public:
    virtual ~LogitsOracle() = default;

    std::vector<double> query(const Image& x);

    std::size_t queries_used() const noexcept { return used_; }
    void set_budget(std::optional<std::size_t> total) noexcept { budget_ = total; }
    std::optional<std::size_t> budget() const noexcept { return budget_; }

    virtual std::size_t num_classes() = 0;

protected:
    virtual std::vector<double> compute_logits(const Image& x) = 0;

private:
    std::size_t used_ = 0;
    std::optional<std::size_t> budget_;
};

struct LossEvaluation {
    double loss = 0.0;
    bool success = false;
};

/// Attacker-side view: turns logits into the surrogate loss and the
/// adversarial check. Losses are never computed model-side.
class LossOracle {
public:
    LossOracle(LogitsOracle& model, LossSpec spec) : model_(&model), spec_(spec) {}

    using Listener = std::function<void(const LossEvaluation&)>;

    LossEvaluation evaluate(const Image& x);

    /// Called after every answered query.
    void set_listener(Listener listener) { listener_ = std::move(listener); }

    const LossSpec& spec() const noexcept { return spec_; }
    LogitsOracle& model() noexcept { return *model_; }
    std::size_t queries_used() const noexcept { return model_->queries_used(); }

private:
    LogitsOracle* model_;
    LossSpec spec_;
    Listener listener_;
};

}  // namespace corrattack
