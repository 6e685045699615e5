#include "corrattack/loss.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "corrattack/errors.hpp"

namespace corrattack {
namespace {

void check_class(std::span<const double> logits, int index) {
    if (logits.size() < 2) throw std::invalid_argument("hinge loss needs at least two classes");
    if (index < 0 || static_cast<std::size_t>(index) >= logits.size())
        throw std::invalid_argument("class index out of range");
}

}  // namespace

double hinge_untargeted(std::span<const double> logits, int label, double margin) {
    check_class(logits, label);
    double other = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < logits.size(); ++j)
        if (static_cast<int>(j) != label) other = std::max(other, logits[j]);
    return std::max(logits[label] - other, -margin);
}

double hinge_targeted(std::span<const double> logits, int target, double margin) {
    check_class(logits, target);
    const double top = *std::max_element(logits.begin(), logits.end());
    return std::max(top - logits[target], -margin);
}

int argmax_class(std::span<const double> logits) {
    if (logits.empty()) throw std::invalid_argument("argmax of empty logits");
    // max_element returns the first maximum
    return static_cast<int>(std::max_element(logits.begin(), logits.end()) - logits.begin());
}

bool check_success(std::span<const double> logits, const LossSpec& spec) {
    const int top = argmax_class(logits);
    return spec.kind == LossSpec::Kind::Untargeted ? top != spec.class_index
                                                   : top == spec.class_index;
}

double LossSpec::loss(std::span<const double> logits) const {
    return kind == Kind::Untargeted ? hinge_untargeted(logits, class_index, margin)
                                    : hinge_targeted(logits, class_index, margin);
}

bool LossSpec::success(std::span<const double> logits) const {
    return check_success(logits, *this);
}

std::vector<double> LogitsOracle::query(const Image& x) {
    if (budget_ && used_ >= *budget_) throw BudgetExhausted(used_);
    std::vector<double> logits = compute_logits(x);
    ++used_;
    return logits;
}

LossEvaluation LossOracle::evaluate(const Image& x) {
    const std::vector<double> logits = model_->query(x);
    const LossEvaluation out{spec_.loss(logits), spec_.success(logits)};
    if (listener_) listener_(out);
    return out;
}

}  // namespace corrattack
