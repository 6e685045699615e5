#pragma once

#include <cstddef>
#include <limits>
#include <random>
#include <span>

#include "corrattack/bandit.hpp"
#include "corrattack/gp.hpp"

namespace corrattack {

struct StageParams {
    std::size_t initial_samples = 4;  // m
    std::size_t window = 12;          // tau
    int alpha = 0;
    double ei_threshold = 1e-4;       // c
};

/// m = round(sample_ratio * n) and tau = round(window_ratio * n) for a stage
/// with n actions, floored at min_samples and min_window.
StageParams stage_params(std::size_t action_count, double sample_ratio, double window_ratio,
                         int alpha, double ei_threshold, std::size_t min_samples = 4,
                         std::size_t min_window = 12);

struct StageEvaluation {
    double g = 0.0;
    bool halt = false;  // stop the search right away (adversarial found)
};

/// What the search acts on. Indices refer to the action list given to
/// run_bandit_stage.
class BanditEnvironment {
public:
    virtual ~BanditEnvironment() = default;
    virtual StageEvaluation evaluate(std::size_t action) = 0;
    /// Commit the most recent evaluation (only called after a negative g).
    virtual void accept(std::size_t action) = 0;
};

enum class StageStop { EiBelowThreshold, CandidatesExhausted, Halted };

struct StageStep {
    std::size_t action = 0;
    double g = 0.0;
    bool accepted = false;
    bool initial_design = false;
    double max_ei = std::numeric_limits<double>::quiet_NaN();  // loss units; NaN for the initial design
    const SampleSet* window = nullptr;                           // after the update
    const gp::GpHyperparams* hyperparams = nullptr;
};

class StageListener {
public:
    virtual ~StageListener() = default;
    virtual void on_step(const StageStep& step) = 0;
};

struct StageSummary {
    std::size_t evaluations = 0;
    std::size_t accepted = 0;
    StageStop stop = StageStop::CandidatesExhausted;
};

/// One Bayesian-optimisation pass over a fixed action set:
///  1. evaluate a Latin-hypercube design of m actions into the window;
///  2. repeat: one hyperparameter step on the window, EI for every candidate
///     (not in the window, not consumed, and not yet evaluated since the
///     last acceptance), evaluate the argmax, accept when
///     g < 0 (if `allow_accept`), update the window with `alpha`;
///  until max EI < c, no candidates remain, or the environment halts.
/// The GP works on standardized differences; EI is rescaled to loss units
/// before the comparison with c.
/// The GP hyperparameters and optimiser state start fresh on every call.
/// `features[a]` is the feature of `actions[a]`. With `consume_on_accept`,
/// an accepted action leaves the candidate set for the rest of the pass.
StageSummary run_bandit_stage(std::span<const ActionSpec> actions,
                              std::span<const Feature> features, int grid_h, int grid_w,
                              const StageParams& params, bool allow_accept,
                              bool consume_on_accept, std::mt19937_64& rng,
                              BanditEnvironment& env, StageListener* listener = nullptr);

}  // namespace corrattack
