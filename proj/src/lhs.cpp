#include "corrattack/lhs.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <tuple>

namespace corrattack {

std::vector<std::size_t> latin_hypercube_init(std::span<const ActionSpec> actions, int grid_h,
                                              int grid_w, std::size_t m, std::mt19937_64& rng) {
    const std::size_t count = std::min(m, actions.size());
    std::vector<std::size_t> chosen;
    if (count == 0) return chosen;
    chosen.reserve(count);

    std::vector<std::size_t> row_perm(m), col_perm(m);
    std::iota(row_perm.begin(), row_perm.end(), 0);
    std::iota(col_perm.begin(), col_perm.end(), 0);
    std::shuffle(row_perm.begin(), row_perm.end(), rng);
    std::shuffle(col_perm.begin(), col_perm.end(), rng);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    const bool keep_row_stratum = m <= static_cast<std::size_t>(grid_h);
    const bool keep_col_stratum = m <= static_cast<std::size_t>(grid_w);
    std::vector<char> taken(actions.size(), 0);

    for (std::size_t s = 0; s < count; ++s) {
        const double pi = (static_cast<double>(row_perm[s]) + unit(rng)) / static_cast<double>(m);
        const double pj = (static_cast<double>(col_perm[s]) + unit(rng)) / static_cast<double>(m);
        // Block centres sit at (i + 0.5) / h in unit coordinates.
        const double ti = pi * grid_h - 0.5;
        const double tj = pj * grid_w - 0.5;

        using Key = std::tuple<int, double, int, std::size_t>;  // (outside strata, dist, k, idx)
        Key best{2, std::numeric_limits<double>::infinity(), 0, 0};
        std::size_t pick = actions.size();
        for (std::size_t a = 0; a < actions.size(); ++a) {
            if (taken[a]) continue;
            const BlockIndex& b = actions[a].block;
            const bool in_strata =
                (!keep_row_stratum || lhs_stratum(b.i, grid_h, m) == row_perm[s]) &&
                (!keep_col_stratum || lhs_stratum(b.j, grid_w, m) == col_perm[s]);
            const double di = b.i - ti;
            const double dj = b.j - tj;
            const Key key{in_strata ? 0 : 1, di * di + dj * dj, b.k, a};
            if (key < best) {
                best = key;
                pick = a;
            }
        }
        taken[pick] = 1;
        chosen.push_back(pick);
    }
    return chosen;
}

}  // namespace corrattack
