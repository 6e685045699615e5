#include "corrattack/attack.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "corrattack/errors.hpp"

namespace corrattack {

std::string to_string(AttackMode mode) { return mode == AttackMode::Diff ? "diff" : "flip"; }

AttackMode parse_attack_mode(const std::string& s) {
    if (s == "diff") return AttackMode::Diff;
    if (s == "flip") return AttackMode::Flip;
    throw std::invalid_argument("unknown attack mode '" + s + "' (expected diff or flip)");
}

std::map<int, int> AttackConfig::default_alpha_schedule(AttackMode mode) {
    if (mode == AttackMode::Flip) return {{32, 1}, {16, 1}, {8, 2}, {4, 2}, {2, 3}};
    return {{32, 0}, {16, 0}, {8, 1}, {4, 1}, {2, 2}};
}

AttackConfig AttackConfig::defaults(AttackMode mode) {
    AttackConfig c;
    c.mode = mode;
    c.alpha_schedule = default_alpha_schedule(mode);
    return c;
}

int AttackConfig::alpha_for(int block_size) const {
    if (alpha_schedule.empty()) return 0;
    const auto exact = alpha_schedule.find(block_size);
    if (exact != alpha_schedule.end()) return exact->second;
    int best = 0;
    int best_dist = std::numeric_limits<int>::max();
    for (const auto& [size, alpha] : alpha_schedule) {
        const int dist = std::abs(size - block_size);
        if (dist < best_dist) {
            best_dist = dist;
            best = alpha;
        }
    }
    return best;
}

void AttackConfig::validate() const {
    auto fail = [](const std::string& what) { throw std::invalid_argument("config: " + what); };
    if (!(epsilon > 0.0)) fail("epsilon must be > 0");
    if (!(eta > 0.0)) fail("eta must be > 0");
    if (!(ei_threshold > 0.0)) fail("ei_threshold must be > 0");
    if (!(sample_ratio > 0.0)) fail("sample_ratio must be > 0");
    if (!(sample_ratio < window_ratio)) fail("sample_ratio must be < window_ratio");
    if (query_budget == 0) fail("query_budget must be > 0");
    if (initial_block < kMinBlockSize) fail("initial_block must be >= 2");
    if (!(margin >= 0.0)) fail("margin must be >= 0");
    if (min_initial_samples == 0) fail("min_initial_samples must be >= 1");
    if (min_window < min_initial_samples) fail("min_window must be >= min_initial_samples");
    for (const auto& [size, alpha] : alpha_schedule)
        if (size < 1 || alpha < 0) fail("alpha_schedule entries must be size >= 1, alpha >= 0");
}

LossSpec AttackConfig::loss_spec(int label) const {
    return target ? LossSpec::targeted(*target, margin) : LossSpec::untargeted(label, margin);
}

namespace {

const char* stop_name(StageStop s) {
    switch (s) {
        case StageStop::EiBelowThreshold: return "ei_threshold";
        case StageStop::CandidatesExhausted: return "exhausted";
        case StageStop::Halted: return "halted";
    }
    return "?";
}

void negate_block(Image& x, const BlockGrid& grid, const BlockIndex& block) {
    const int b = grid.block_size;
    for (int r = 0; r < b; ++r)
        for (int c = 0; c < b; ++c) {
            double& v = x.at(block.k, block.i * b + r, block.j * b + c);
            v = -v;
        }
}

bool can_split(const BlockGrid& grid) {
    return grid.block_size % 2 == 0 && grid.block_size / 2 >= kMinBlockSize;
}

}  // namespace

AttackRun::AttackRun(LogitsOracle& model, const Image& x, int label, const AttackConfig& config,
                     AttackObserver* observer)
    : oracle_(model, config.loss_spec(label)),
      config_(config),
      observer_(observer),
      rng_(config.seed) {
    config_.validate();
    if (x.size() == 0) throw std::invalid_argument("attack: empty image");
    const std::size_t classes = model.num_classes();
    const int index = config_.target ? *config_.target : label;
    if (index < 0 || static_cast<std::size_t>(index) >= classes)
        throw std::invalid_argument("attack: class index out of range");

    state_.origin = x;
    state_.x_t = x;
    state_.perturbation = Image(x.shape(), 0.0);
    state_.grid = make_grid(x.shape(), config_.initial_block);

    start_queries_ = model.queries_used();
    saved_budget_ = model.budget();
    std::size_t limit = start_queries_ + config_.query_budget;
    if (saved_budget_) limit = std::min(limit, *saved_budget_);
    model.set_budget(limit);

    oracle_.set_listener([this](const LossEvaluation& e) {
        result_.loss_trace.emplace_back(queries(), e.loss);
        if (e.success) success_ = true;
    });
}

bool AttackRun::initial_check() {
    const LossEvaluation e = oracle_.evaluate(state_.x_t);
    state_.current_loss = e.loss;
    if (observer_) observer_->on_query(state_, queries());
    return e.success;
}

bool AttackRun::randomize_signs() {
    std::bernoulli_distribution coin(0.5);
    const BlockGrid& grid = state_.grid;
    for (std::size_t l = 0; l < grid.block_count(); ++l) {
        const double v = coin(rng_) ? config_.epsilon : -config_.epsilon;
        add_block_delta(state_.perturbation, grid, grid.block_at(l), v);
    }
    Image moved = state_.origin;
    auto px = moved.pixels();
    const auto d = state_.perturbation.pixels();
    for (std::size_t p = 0; p < px.size(); ++p) px[p] += d[p];
    Image projected = project_ball(moved, state_.origin, config_.epsilon);
    const LossEvaluation e = oracle_.evaluate(projected);
    state_.x_t = std::move(projected);
    state_.current_loss = e.loss;
    if (observer_) observer_->on_query(state_, queries());
    return e.success;
}

void AttackRun::apply(const ActionSpec& action, const DifferenceResult& d) {
    state_.x_t = d.candidate;
    state_.current_loss = d.candidate_loss;
    if (action.kind != ActionKind::Diff) negate_block(state_.perturbation, state_.grid, action.block);
    result_.accepted.push_back(
        {queries(), state_.stage, state_.grid.block_size, action.block, d.step, d.candidate_loss});
}

class ImageEnvironment final : public BanditEnvironment {
public:
    ImageEnvironment(AttackRun& run, std::span<const ActionSpec> actions)
        : run_(run), actions_(actions) {}

    StageEvaluation evaluate(std::size_t a) override {
        AttackState& s = run_.state_;
        queries_before = run_.queries();
        last = evaluate_difference(run_.oracle_, s.x_t, s.current_loss, s.origin,
                                   run_.config_.epsilon, s.grid, actions_[a]);
        if (last.success) run_.apply(actions_[a], last);
        return {last.g, last.success};
    }

    void accept(std::size_t a) override { run_.apply(actions_[a], last); }

    DifferenceResult last;
    std::size_t queries_before = 0;

private:
    AttackRun& run_;
    std::span<const ActionSpec> actions_;
};

class PassListener final : public StageListener {
public:
    PassListener(AttackRun& run, ImageEnvironment& env, std::span<const ActionSpec> actions,
                 int alpha)
        : run_(run), env_(env), actions_(actions), alpha_(alpha) {}

    void on_step(const StageStep& step) override {
        if (!run_.observer_) return;
        EvaluationEvent ev;
        ev.state = &run_.state_;
        ev.action = &actions_[step.action];
        ev.g = step.g;
        ev.accepted = step.accepted;
        ev.initial_design = step.initial_design;
        ev.success = env_.last.success;
        ev.queries_before = env_.queries_before;
        ev.queries_after = run_.queries();
        ev.window = step.window;
        ev.alpha = alpha_;
        ev.max_ei = step.max_ei;
        ev.config = &run_.config_;
        run_.observer_->on_evaluation(ev);
    }

private:
    AttackRun& run_;
    ImageEnvironment& env_;
    std::span<const ActionSpec> actions_;
    int alpha_;
};

std::size_t AttackRun::run_pass(std::span<const ActionSpec> actions,
                                std::span<const Feature> features, const std::string& pass_name,
                                SearchPolicy policy) {
    StageRecord rec;
    rec.stage = state_.stage;
    rec.block_size = state_.grid.block_size;
    rec.pass = pass_name;
    rec.actions = actions.size();
    rec.queries_start = queries();

    const int alpha = config_.alpha_for(state_.grid.block_size);
    ImageEnvironment env(*this, actions);
    // Recorded even when the budget runs out mid-pass.
    struct Closer {
        AttackRun& run;
        StageRecord& rec;
        ~Closer() {
            rec.queries_end = run.queries();
            run.result_.stages.push_back(rec);
        }
    } closer{*this, rec};
    rec.stop = "budget";

    if (actions.empty()) {
        rec.stop = "empty";
        return 0;
    }

    if (policy == SearchPolicy::Bayesian) {
        const StageParams params =
            stage_params(actions.size(), config_.sample_ratio, config_.window_ratio, alpha,
                         config_.ei_threshold, config_.min_initial_samples, config_.min_window);
        PassListener listener(*this, env, actions, alpha);
        const bool consume = actions.front().kind != ActionKind::Diff;
        const StageSummary summary = run_bandit_stage(actions, features, state_.grid.h,
                                                      state_.grid.w, params, true, consume, rng_,
                                                      env, &listener);
        rec.evaluations = summary.evaluations;
        rec.accepted = summary.accepted;
        rec.stop = stop_name(summary.stop);
        return summary.accepted;
    }

    std::vector<std::size_t> order(actions.size());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng_);
    rec.stop = "exhausted";
    for (std::size_t a : order) {
        const StageEvaluation ev = env.evaluate(a);
        ++rec.evaluations;
        const bool accepted = !ev.halt && ev.g < 0.0;
        if (accepted) {
            env.accept(a);
            ++rec.accepted;
        }
        if (observer_) {
            EvaluationEvent e;
            e.state = &state_;
            e.action = &actions[a];
            e.g = ev.g;
            e.accepted = accepted;
            e.success = ev.halt;
            e.queries_before = env.queries_before;
            e.queries_after = queries();
            e.alpha = alpha;
            e.max_ei = std::numeric_limits<double>::quiet_NaN();
            e.config = &config_;
            observer_->on_evaluation(e);
        }
        if (ev.halt) {
            rec.stop = "halted";
            break;
        }
    }
    return rec.accepted;
}

AttackResult AttackRun::finish(std::string termination) {
    oracle_.model().set_budget(saved_budget_);
    oracle_.set_listener(nullptr);
    AttackResult out = std::move(result_);
    result_ = AttackResult{};
    out.success = success_;
    out.queries = queries();
    out.final_image = state_.x_t;
    out.final_loss = state_.current_loss;
    out.termination = success_ ? "success" : std::move(termination);
    return out;
}

AttackResult run_hierarchical(LogitsOracle& model, const Image& x, int label,
                              const AttackConfig& config, SearchPolicy policy,
                              AttackObserver* observer) {
    AttackRun run(model, x, label, config, observer);
    AttackState& s = run.state();
    const bool flip = config.mode == AttackMode::Flip || policy == SearchPolicy::RandomOrder;
    try {
        if (run.initial_check()) return run.finish("success");
        if (flip && run.randomize_signs()) return run.finish("success");

        std::vector<ActionSpec> actions;
        std::vector<Feature> features;
        std::vector<Feature> grid_features;
        auto build = [&](ActionMode mode) {
            actions = make_action_set(mode, s.grid, s.perturbation, config.epsilon, config.eta);
            features.clear();
            for (const auto& a : actions) features.push_back(grid_features[s.grid.linear_index(a.block)]);
        };

        int stage = 0;
        for (;;) {
            s.stage = stage++;
            s.grid.stage = s.stage;
            grid_features = make_features(s.grid, pca_first_component(s.origin, s.grid));

            std::size_t accepted = 0;
            if (!flip) {
                build(ActionMode::Diff);
                accepted = run.run_pass(actions, features, "diff", policy);
            } else {
                build(ActionMode::FlipNegativePass);
                accepted = run.run_pass(actions, features, "negative", policy);
                if (!run.succeeded()) {
                    build(ActionMode::FlipPositivePass);
                    accepted += run.run_pass(actions, features, "positive", policy);
                }
            }
            if (run.succeeded()) return run.finish("success");
            if (can_split(s.grid)) {
                s.grid = split_blocks(s.grid);
            } else if (accepted == 0) {
                return run.finish("converged");
            }
        }
    } catch (const BudgetExhausted&) {
        return run.finish("budget");
    }
}

AttackResult hierarchical_diff(LogitsOracle& model, const Image& x, int label,
                               const AttackConfig& config, AttackObserver* observer) {
    AttackConfig c = config;
    c.mode = AttackMode::Diff;
    return run_hierarchical(model, x, label, c, SearchPolicy::Bayesian, observer);
}

AttackResult hierarchical_flip(LogitsOracle& model, const Image& x, int label,
                               const AttackConfig& config, AttackObserver* observer) {
    AttackConfig c = config;
    c.mode = AttackMode::Flip;
    return run_hierarchical(model, x, label, c, SearchPolicy::Bayesian, observer);
}

AttackResult random_block_baseline(LogitsOracle& model, const Image& x, int label,
                                   const AttackConfig& config, AttackObserver* observer) {
    AttackConfig c = config;
    c.mode = AttackMode::Flip;
    return run_hierarchical(model, x, label, c, SearchPolicy::RandomOrder, observer);
}

AttackResult run_attack(LogitsOracle& model, const Image& x, int label,
                        const AttackConfig& config, AttackObserver* observer) {
    return config.mode == AttackMode::Diff ? hierarchical_diff(model, x, label, config, observer)
                                           : hierarchical_flip(model, x, label, config, observer);
}

}  // namespace corrattack
