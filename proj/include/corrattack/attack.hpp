#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "corrattack/bandit.hpp"
#include "corrattack/image.hpp"
#include "corrattack/loss.hpp"
#include "corrattack/stage.hpp"

namespace corrattack {

enum class AttackMode { Diff, Flip };

std::string to_string(AttackMode mode);
AttackMode parse_attack_mode(const std::string& s);

struct AttackConfig {
    AttackMode mode = AttackMode::Flip;
    double epsilon = 0.05;
    double eta = 0.03;
    int initial_block = 32;
    double ei_threshold = 1e-4;
    double sample_ratio = 0.03;
    double window_ratio = 0.09;
    std::size_t min_initial_samples = 4;
    std::size_t min_window = 12;
    std::map<int, int> alpha_schedule = default_alpha_schedule(AttackMode::Flip);  // block size -> alpha
    std::size_t query_budget = 10000;
    double margin = 0.05;
    std::optional<int> target;
    std::uint64_t seed = 0;

    /// Flip: alpha 1,1,2,2,3 and Diff: 0,0,1,1,2 for block sizes 32..2.
    static AttackConfig defaults(AttackMode mode);
    static std::map<int, int> default_alpha_schedule(AttackMode mode);

    /// Alpha for a block size; sizes missing from the schedule use the entry
    /// of the nearest listed size.
    int alpha_for(int block_size) const;

    /// Throws std::invalid_argument on inconsistent settings.
    void validate() const;

    LossSpec loss_spec(int label) const;
};

struct AttackState {
    Image origin;        // natural image x
    Image x_t;           // current iterate, always projected
    Image perturbation;  // flip mode: pre-projection offset, block-constant +-eps
    double current_loss = 0.0;
    BlockGrid grid;
    int stage = 0;
};

struct AcceptedStep {
    std::size_t query = 0;  // oracle count after the accepting evaluation
    int stage = 0;
    int block_size = 0;
    BlockIndex block;
    double step = 0.0;
    double loss = 0.0;
};

struct StageRecord {
    int stage = 0;
    int block_size = 0;
    std::string pass;  // "diff", "negative", "positive"
    std::size_t actions = 0;
    std::size_t queries_start = 0;
    std::size_t queries_end = 0;
    std::size_t evaluations = 0;
    std::size_t accepted = 0;
    std::string stop;
};

struct AttackResult {
    bool success = false;
    std::size_t queries = 0;
    Image final_image;
    double final_loss = 0.0;
    std::string termination;  // "success", "budget", "converged"
    std::vector<std::pair<std::size_t, double>> loss_trace;  // (query index, loss), every query
    std::vector<AcceptedStep> accepted;
    std::vector<StageRecord> stages;
};

/// One difference evaluation inside a run, reported after the state and the
/// window have been updated.
struct EvaluationEvent {
    const AttackState* state = nullptr;
    const ActionSpec* action = nullptr;
    double g = 0.0;
    bool accepted = false;
    bool initial_design = false;
    bool success = false;
    std::size_t queries_before = 0;  // relative to the run start
    std::size_t queries_after = 0;
    const SampleSet* window = nullptr;  // nullptr for the random baseline
    int alpha = 0;
    double max_ei = 0.0;
    const AttackConfig* config = nullptr;
};

class AttackObserver {
public:
    virtual ~AttackObserver() = default;
    virtual void on_evaluation(const EvaluationEvent&) {}
    /// Fires after every non-evaluation query (initial checks).
    virtual void on_query(const AttackState&, std::size_t /*queries*/) {}
};

/// How a pass picks actions.
enum class SearchPolicy { Bayesian, RandomOrder };

/// Shared plumbing for one attack run: owns the state and records results.
class AttackRun {
public:
    AttackRun(LogitsOracle& model, const Image& x, int label, const AttackConfig& config,
              AttackObserver* observer);

    AttackState& state() noexcept { return state_; }
    const AttackConfig& config() const noexcept { return config_; }
    LossOracle& oracle() noexcept { return oracle_; }
    std::mt19937_64& rng() noexcept { return rng_; }
    std::size_t queries() const noexcept { return oracle_.queries_used() - start_queries_; }
    bool succeeded() const noexcept { return success_; }

    /// Queries the natural image. True when already adversarial.
    bool initial_check();

    /// Adds independent +-eps per block of the current grid and measures the
    /// loss of the result (one query). True when that is adversarial.
    bool randomize_signs();

    /// Runs one pass over `actions` at the current grid.
    /// Returns the number of accepted actions.
    std::size_t run_pass(std::span<const ActionSpec> actions, std::span<const Feature> features,
                         const std::string& pass_name, SearchPolicy policy);

    AttackResult finish(std::string termination);

private:
    friend class ImageEnvironment;
    friend class PassListener;

    void apply(const ActionSpec& action, const DifferenceResult& d);

    LossOracle oracle_;
    AttackConfig config_;
    AttackObserver* observer_;
    AttackState state_;
    std::mt19937_64 rng_;
    std::size_t start_queries_ = 0;
    std::optional<std::size_t> saved_budget_;
    bool success_ = false;
    AttackResult result_;
};

/// Driver shared by the hierarchical attacks and the random baseline.
AttackResult run_hierarchical(LogitsOracle& model, const Image& x, int label,
                              const AttackConfig& config, SearchPolicy policy,
                              AttackObserver* observer = nullptr);

/// Block-wise finite-difference search from coarse to fine blocks.
AttackResult hierarchical_diff(LogitsOracle& model, const Image& x, int label,
                               const AttackConfig& config, AttackObserver* observer = nullptr);

/// Discrete +-eps search with a negative and a positive flip pass per block
/// size.
AttackResult hierarchical_flip(LogitsOracle& model, const Image& x, int label,
                               const AttackConfig& config, AttackObserver* observer = nullptr);

/// Same action space and acceptance rule as hierarchical_flip, but every pass
/// visits its actions in a uniformly random order instead of by EI.
AttackResult random_block_baseline(LogitsOracle& model, const Image& x, int label,
                                   const AttackConfig& config,
                                   AttackObserver* observer = nullptr);

/// Dispatches on config.mode.
AttackResult run_attack(LogitsOracle& model, const Image& x, int label,
                        const AttackConfig& config, AttackObserver* observer = nullptr);

}  // namespace corrattack
