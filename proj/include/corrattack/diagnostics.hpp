#pragma once

#include <vector>

#include "corrattack/image.hpp"
#include "corrattack/loss.hpp"

namespace corrattack {

/// Per-block central difference l(x + eta e) - l(x - eta e), indexed by
/// BlockGrid::linear_index. Steps are not projected. Two queries per block.
std::vector<double> finite_difference_map(LossOracle& oracle, const Image& x,
                                          const BlockGrid& grid, double eta);

struct ChangeMap {
    std::vector<double> before;  // map at x
    std::vector<double> after;   // map at x - eta e*
    std::vector<double> change;  // after - before
    BlockIndex stepped;          // e*: block with the largest |before|
};

/// Difference-map drift after one step on the block with the largest
/// |difference| (lowest index on ties).
ChangeMap change_map(LossOracle& oracle, const Image& x, const BlockGrid& grid, double eta);

}  // namespace corrattack
