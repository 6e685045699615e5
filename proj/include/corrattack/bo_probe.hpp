#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace corrattack {

struct RewardField {
    int h = 0;
    int w = 0;
    int c = 0;
    std::vector<double> values;  // per block, channel-major; lower is better

    std::size_t size() const noexcept { return values.size(); }
};

/// Sum of a spatial field shared by all channels and one per channel, each
/// iid normal blurred with a Gaussian of `smoothing` blocks (clamped borders),
/// then scaled to unit standard deviation.
RewardField smooth_reward_field(int h, int w, int c, double smoothing, std::uint64_t seed);

struct RankProbeConfig {
    double query_fraction = 0.15;
    double sample_ratio = 0.03;
    double window_ratio = 0.09;
    double ei_threshold = 1e-4;
    int alpha = 0;
    std::uint64_t seed = 0;
};

struct RankPoint {
    std::size_t queries = 0;
    double query_fraction = 0.0;
    double normalized_rank = 0.0;  // share of actions strictly better than the best found
};

struct RankTrace {
    std::vector<RankPoint> points;  // one per query
    double final_rank = 1.0;
};

/// Runs the stage search on a frozen field (no acceptance, so the field
/// never drifts) until ceil(query_fraction * |A|) actions have been queried
/// or the search stops on its own.
RankTrace bo_rank_probe(const RewardField& field, const RankProbeConfig& config);

std::string rank_trace_csv(const RankTrace& trace);

}  // namespace corrattack
