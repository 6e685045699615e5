#include "corrattack/stage.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "corrattack/acquisition.hpp"
#include "corrattack/lhs.hpp"

namespace corrattack {

StageParams stage_params(std::size_t action_count, double sample_ratio, double window_ratio,
                         int alpha, double ei_threshold, std::size_t min_samples,
                         std::size_t min_window) {
    const double n = static_cast<double>(action_count);
    StageParams p;
    p.initial_samples =
        std::max(min_samples, static_cast<std::size_t>(std::llround(sample_ratio * n)));
    p.window = std::max(min_window, static_cast<std::size_t>(std::llround(window_ratio * n)));
    p.alpha = alpha;
    p.ei_threshold = ei_threshold;
    return p;
}

StageSummary run_bandit_stage(std::span<const ActionSpec> actions,
                              std::span<const Feature> features, int grid_h, int grid_w,
                              const StageParams& params, bool allow_accept,
                              bool consume_on_accept, std::mt19937_64& rng,
                              BanditEnvironment& env, StageListener* listener) {
    StageSummary summary;
    if (actions.empty()) return summary;

    SampleSet window(params.window);
    std::vector<char> consumed(actions.size(), 0);
    // Acceptance count at each action's last evaluation. Candidates are the
    // actions with no sample in the window and none taken at the present state.
    constexpr std::size_t kNever = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> seen_at(actions.size(), kNever);
    std::size_t state_version = 0;
    gp::GpHyperparams hp = gp::GpHyperparams::initial();
    gp::HyperparamFitter fitter;

    auto report = [&](std::size_t a, double g, bool accepted, bool initial, double max_ei) {
        if (!listener) return;
        StageStep step{a, g, accepted, initial, max_ei, &window, &hp};
        listener->on_step(step);
    };

    for (std::size_t a : latin_hypercube_init(actions, grid_h, grid_w, params.initial_samples, rng)) {
        const StageEvaluation ev = env.evaluate(a);
        ++summary.evaluations;
        seen_at[a] = state_version;
        window.update(false, actions[a].block, features[a], ev.g, params.alpha);
        report(a, ev.g, false, true, std::numeric_limits<double>::quiet_NaN());
        if (ev.halt) {
            summary.stop = StageStop::Halted;
            return summary;
        }
    }

    std::vector<std::size_t> candidates;
    std::vector<gp::FeatureVec> candidate_features;
    std::vector<Candidate> scored;
    for (;;) {
        candidates.clear();
        candidate_features.clear();
        for (std::size_t a = 0; a < actions.size(); ++a) {
            if (consumed[a] || seen_at[a] == state_version || window.contains(actions[a].block))
                continue;
            candidates.push_back(a);
            candidate_features.push_back(features[a].vec());
        }
        if (candidates.empty()) {
            summary.stop = StageStop::CandidatesExhausted;
            return summary;
        }

        const gp::GpDataset data = window.dataset();
        if (data.size() >= 2) hp = fitter.step(hp, data);
        const gp::GpModel model(hp, data);
        const double best =
            data.empty() ? 0.0 : *std::min_element(data.values().begin(), data.values().end());

        const auto posteriors = model.predict(candidate_features);
        scored.clear();
        for (std::size_t c = 0; c < candidates.size(); ++c)
            scored.push_back({candidates[c], posteriors[c]});
        const AcquisitionScore pick = select_action(scored, best);
        // EI is linear in the output scale, so this is EI in loss units.
        const double max_ei = pick.ei * data.raw_std();
        if (max_ei < params.ei_threshold) {
            summary.stop = StageStop::EiBelowThreshold;
            return summary;
        }

        const std::size_t a = pick.action_id;
        const StageEvaluation ev = env.evaluate(a);
        ++summary.evaluations;
        seen_at[a] = state_version;
        if (ev.halt) {
            report(a, ev.g, false, false, max_ei);
            summary.stop = StageStop::Halted;
            return summary;
        }
        const bool accepted = allow_accept && ev.g < 0.0;
        if (accepted) {
            env.accept(a);
            ++summary.accepted;
            ++state_version;
            if (consume_on_accept) consumed[a] = 1;
        }
        window.update(accepted, actions[a].block, features[a], ev.g, params.alpha);
        report(a, ev.g, accepted, false, max_ei);
    }
}

}  // namespace corrattack
