#pragma once

#include <cstddef>
#include <deque>
#include <span>
#include <vector>

#include "corrattack/gp.hpp"
#include "corrattack/image.hpp"
#include "corrattack/loss.hpp"

namespace corrattack {

/// Arm context: block coordinates and first principal-component score, all
/// normalized to [0,1].
struct Feature {
    double i = 0.0;
    double j = 0.0;
    double k = 0.0;
    double pca = 0.0;

    gp::FeatureVec vec() const { return {i, j, k, pca}; }
    friend bool operator==(const Feature&, const Feature&) = default;
};

enum class ActionKind {
    Diff,       // better of +-eta on the block, two queries
    FlipToPos,  // -eps -> +eps, adds +2 eps
    FlipToNeg,  // +eps -> -eps, adds -2 eps
};

struct ActionSpec {
    ActionKind kind = ActionKind::Diff;
    BlockIndex block;
    double magnitude = 0.0;  // eta for Diff, 2 eps for flips

    // Signed delta a flip adds; Diff actions are evaluated at +-magnitude.
    double flip_amount() const noexcept {
        return kind == ActionKind::FlipToNeg ? -magnitude : magnitude;
    }
};

enum class ActionMode { Diff, FlipNegativePass, FlipPositivePass };

/// Diff: one action per block. Negative pass: FlipToPos on blocks whose
/// perturbation sums negative. Positive pass: FlipToNeg on blocks that sum
/// positive. `perturbation` is the pre-projection offset from the natural
/// image (only read in the flip modes).
std::vector<ActionSpec> make_action_set(ActionMode mode, const BlockGrid& grid,
                                        const Image& perturbation, double epsilon, double eta);

/// First principal-component score of every block of the natural image,
/// indexed by BlockGrid::linear_index and min-max normalized to [0,1]. The
/// principal direction is signed so its largest-magnitude loading is
/// positive. Identical blocks give 0.5 everywhere.
std::vector<double> pca_first_component(const Image& natural, const BlockGrid& grid);

/// Feature of every block, indexed by BlockGrid::linear_index.
std::vector<Feature> make_features(const BlockGrid& grid, std::span<const double> pca_scores);

struct DifferenceResult {
    double g = 0.0;            // loss(candidate) - current loss
    double step = 0.0;         // signed delta applied to the block
    std::size_t queries = 0;   // oracle calls spent
    Image candidate;           // projected image behind g
    double candidate_loss = 0.0;
    bool success = false;      // some query in this evaluation was adversarial
};

/// Flip: one query at project(x_t + a). Diff: queries at +eta then -eta and
/// keeps the lower loss (ties keep +eta). Stops right after an adversarial
/// response. BudgetExhausted propagates from the oracle.
DifferenceResult evaluate_difference(LossOracle& oracle, const Image& x_t, double current_loss,
                                     const Image& origin, double epsilon,
                                     const BlockGrid& grid, const ActionSpec& action);

struct SampleEntry {
    Feature feature;
    BlockIndex block;
    double g = 0.0;
    std::size_t birth = 0;
};

/// Forgetting window of (feature, difference) observations, oldest first.
class SampleSet {
public:
    explicit SampleSet(std::size_t capacity = 0) : capacity_(capacity) {}

    std::size_t capacity() const noexcept { return capacity_; }
    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }
    const std::deque<SampleEntry>& entries() const noexcept { return entries_; }
    bool contains(const BlockIndex& block) const;

    /// Accepted: drop every entry within L1 block distance alpha of `block`
    /// (any channel) and discard the observation. Rejected: append it.
    /// Then evict the oldest entries down to capacity.
    void update(bool accepted, const BlockIndex& block, const Feature& feature, double g,
                int alpha);

    gp::GpDataset dataset() const;

private:
    std::size_t capacity_;
    std::deque<SampleEntry> entries_;
    std::size_t next_birth_ = 0;
};

SampleSet update_samples(SampleSet window, bool accepted, const BlockIndex& block,
                         const Feature& feature, double g, int alpha);

}  // namespace corrattack
