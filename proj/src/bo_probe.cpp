#include "corrattack/bo_probe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include "corrattack/bandit.hpp"
#include "corrattack/stage.hpp"

namespace corrattack {

namespace {

std::vector<double> blur(const std::vector<double>& in, int h, int w, double sigma) {
    if (sigma <= 0.0) return in;
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> kernel(2 * radius + 1);
    double total = 0.0;
    for (int t = -radius; t <= radius; ++t)
        total += kernel[t + radius] = std::exp(-0.5 * t * t / (sigma * sigma));
    for (double& k : kernel) k /= total;

    std::vector<double> tmp(in.size()), out(in.size());
    for (int i = 0; i < h; ++i)
        for (int j = 0; j < w; ++j) {
            double s = 0.0;
            for (int t = -radius; t <= radius; ++t)
                s += kernel[t + radius] * in[i * w + std::clamp(j + t, 0, w - 1)];
            tmp[i * w + j] = s;
        }
    for (int i = 0; i < h; ++i)
        for (int j = 0; j < w; ++j) {
            double s = 0.0;
            for (int t = -radius; t <= radius; ++t)
                s += kernel[t + radius] * tmp[std::clamp(i + t, 0, h - 1) * w + j];
            out[i * w + j] = s;
        }
    return out;
}

class FieldEnvironment final : public BanditEnvironment {
public:
    FieldEnvironment(const RewardField& field, std::span<const ActionSpec> actions,
                     const BlockGrid& grid, std::size_t limit, RankTrace& trace)
        : field_(field), actions_(actions), grid_(grid), limit_(limit), trace_(trace) {}

    StageEvaluation evaluate(std::size_t a) override {
        const double g = field_.values[grid_.linear_index(actions_[a].block)];
        best_ = std::min(best_, g);
        ++queries_;
        const auto better = std::count_if(field_.values.begin(), field_.values.end(),
                                          [&](double v) { return v < best_; });
        const double n = static_cast<double>(field_.size());
        trace_.points.push_back({queries_, queries_ / n, static_cast<double>(better) / n});
        return {g, queries_ >= limit_};
    }

    void accept(std::size_t) override {}

private:
    const RewardField& field_;
    std::span<const ActionSpec> actions_;
    const BlockGrid& grid_;
    std::size_t limit_;
    RankTrace& trace_;
    std::size_t queries_ = 0;
    double best_ = std::numeric_limits<double>::infinity();
};

}  // namespace

RewardField smooth_reward_field(int h, int w, int c, double smoothing, std::uint64_t seed) {
    if (h <= 0 || w <= 0 || c <= 0) throw std::invalid_argument("smooth_reward_field: empty grid");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const std::size_t plane = static_cast<std::size_t>(h) * w;
    auto draw = [&] {
        std::vector<double> v(plane);
        for (double& e : v) e = normal(rng);
        return blur(v, h, w, smoothing);
    };
    const std::vector<double> shared = draw();
    RewardField f{h, w, c, std::vector<double>(plane * c)};
    for (int k = 0; k < c; ++k) {
        const std::vector<double> own = draw();
        for (std::size_t p = 0; p < plane; ++p) f.values[k * plane + p] = shared[p] + own[p];
    }
    double mean = 0.0;
    for (double v : f.values) mean += v;
    mean /= static_cast<double>(f.size());
    double var = 0.0;
    for (double v : f.values) var += (v - mean) * (v - mean);
    const double sd = std::sqrt(var / static_cast<double>(f.size()));
    for (double& v : f.values) v = sd > 0.0 ? (v - mean) / sd : 0.0;
    return f;
}

RankTrace bo_rank_probe(const RewardField& field, const RankProbeConfig& config) {
    if (field.size() != static_cast<std::size_t>(field.h) * field.w * field.c || field.size() == 0)
        throw std::invalid_argument("bo_rank_probe: malformed field");
    BlockGrid grid{1, field.h, field.w, field.c, 0};
    const Image blank(Shape{field.c, field.h, field.w}, 0.0);
    const auto actions = make_action_set(ActionMode::Diff, grid, blank, 0.0, 1.0);

    // No image behind the field, so the principal-component feature is flat.
    const std::vector<Feature> features =
        make_features(grid, std::vector<double>(grid.block_count(), 0.5));

    const auto limit = static_cast<std::size_t>(
        std::ceil(config.query_fraction * static_cast<double>(actions.size())));
    const StageParams params =
        stage_params(actions.size(), config.sample_ratio, config.window_ratio, config.alpha,
                     config.ei_threshold);

    RankTrace trace;
    std::mt19937_64 rng(config.seed);
    FieldEnvironment env(field, actions, grid, std::max<std::size_t>(limit, 1), trace);
    run_bandit_stage(actions, features, grid.h, grid.w, params, false, false, rng, env);
    if (!trace.points.empty()) trace.final_rank = trace.points.back().normalized_rank;
    return trace;
}

std::string rank_trace_csv(const RankTrace& trace) {
    std::ostringstream os;
    os.precision(17);
    os << "queries,query_fraction,normalized_rank\n";
    for (const auto& p : trace.points)
        os << p.queries << ',' << p.query_fraction << ',' << p.normalized_rank << '\n';
    return os.str();
}

}  // namespace corrattack
