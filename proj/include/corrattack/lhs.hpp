#pragma once

#include <cstddef>
#include <random>
#include <span>
#include <vector>

#include "corrattack/bandit.hpp"

namespace corrattack {

/// Latin-hypercube initial design over the (i, j) rectangle of an h x w grid.
///
/// Draws m points, one per row stratum and one per column stratum, and maps
/// each to the nearest action that has not been picked yet (Euclidean distance
/// in block coordinates; ties go to the lower channel, then the lower position
/// in `actions`). When m <= h the row is kept inside the point's row stratum,
/// likewise for columns, so the chosen actions cover distinct strata whenever
/// such an action is available. Returns min(m, |actions|) distinct indices
/// into `actions`.
std::vector<std::size_t> latin_hypercube_init(std::span<const ActionSpec> actions, int grid_h,
                                              int grid_w, std::size_t m, std::mt19937_64& rng);

/// Stratum of a row (or column) index when `extent` cells are split into m
/// strata.
inline std::size_t lhs_stratum(int index, int extent, std::size_t m) {
    return static_cast<std::size_t>(index) * m / static_cast<std::size_t>(extent);
}

}  // namespace corrattack
