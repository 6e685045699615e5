#include "corrattack/acquisition.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "corrattack/errors.hpp"

namespace corrattack {

double expected_improvement(double mean, double variance, double best) {
    const double sigma = variance > 0.0 ? std::sqrt(variance) : 0.0;
    if (sigma == 0.0) return std::max(best - mean, 0.0);
    const double gamma = (best - mean) / sigma;
    const double cdf = 0.5 * std::erfc(-gamma / std::numbers::sqrt2);
    const double pdf = std::exp(-0.5 * gamma * gamma) / std::sqrt(2.0 * std::numbers::pi);
    return std::max(sigma * (gamma * cdf + pdf), 0.0);
}

AcquisitionScore select_action(std::span<const Candidate> candidates, double best) {
    if (candidates.empty()) throw NoCandidates("select_action: no candidate actions");
    AcquisitionScore top{candidates.front().action_id, -1.0};
    for (const auto& c : candidates) {
        const double ei = expected_improvement(c.posterior.mean, c.posterior.variance, best);
        if (ei > top.ei || (ei == top.ei && c.action_id < top.action_id)) top = {c.action_id, ei};
    }
    return top;
}

}  // namespace corrattack
