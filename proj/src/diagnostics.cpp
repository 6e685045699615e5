#include "corrattack/diagnostics.hpp"

#include <cmath>
#include <stdexcept>

namespace corrattack {

std::vector<double> finite_difference_map(LossOracle& oracle, const Image& x,
                                          const BlockGrid& grid, double eta) {
    if (grid.h * grid.block_size != x.height() || grid.w * grid.block_size != x.width() ||
        grid.c != x.channels())
        throw std::invalid_argument("finite_difference_map: grid does not match image");
    std::vector<double> out(grid.block_count());
    Image probe = x;
    for (std::size_t l = 0; l < out.size(); ++l) {
        const BlockIndex b = grid.block_at(l);
        add_block_delta(probe, grid, b, eta);
        const double up = oracle.evaluate(probe).loss;
        probe = x;
        add_block_delta(probe, grid, b, -eta);
        const double down = oracle.evaluate(probe).loss;
        probe = x;
        out[l] = up - down;
    }
    return out;
}

ChangeMap change_map(LossOracle& oracle, const Image& x, const BlockGrid& grid, double eta) {
    ChangeMap m;
    m.before = finite_difference_map(oracle, x, grid, eta);
    std::size_t top = 0;
    for (std::size_t l = 1; l < m.before.size(); ++l)
        if (std::fabs(m.before[l]) > std::fabs(m.before[top])) top = l;
    m.stepped = grid.block_at(top);
    const Image moved = apply_block_delta(x, grid, m.stepped, -eta);
    m.after = finite_difference_map(oracle, moved, grid, eta);
    m.change.resize(m.before.size());
    for (std::size_t l = 0; l < m.before.size(); ++l) m.change[l] = m.after[l] - m.before[l];
    return m;
}

}  // namespace corrattack
