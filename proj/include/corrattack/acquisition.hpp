#pragma once

#include <cstddef>
#include <span>

#include "corrattack/gp.hpp"

namespace corrattack {

// The attack minimises the difference function, so improvement is measured
// downward from the best (lowest) observed value:
//   gamma = (best - mean) / sigma,  EI = sigma * (gamma * Phi(gamma) + phi(gamma)).
// A zero variance degenerates to max(best - mean, 0).
double expected_improvement(double mean, double variance, double best);

struct Candidate {
    std::size_t action_id;
    gp::GpPosterior posterior;
};

struct AcquisitionScore {
    std::size_t action_id;
    double ei;
};

/// Argmax of EI over the candidates; equal scores resolve to the lowest
/// action id. Throws NoCandidates on an empty list.
AcquisitionScore select_action(std::span<const Candidate> candidates, double best);

}  // namespace corrattack
