#include "corrattack/image.hpp"

#include <stdexcept>
#include <string>

#include "corrattack/errors.hpp"
#include "corrattack/simd/kernels.hpp"

namespace corrattack {

Image::Image(Shape shape, double fill) : shape_(shape), pixels_(shape.size(), fill) {
    if (shape.channels <= 0 || shape.height <= 0 || shape.width <= 0)
        throw std::invalid_argument("image dimensions must be positive");
}

Image::Image(Shape shape, std::vector<double> pixels) : shape_(shape), pixels_(std::move(pixels)) {
    if (shape.channels <= 0 || shape.height <= 0 || shape.width <= 0)
        throw std::invalid_argument("image dimensions must be positive");
    if (pixels_.size() != shape.size())
        throw std::invalid_argument("pixel count " + std::to_string(pixels_.size()) +
                                    " does not match shape");
}

Image project_ball(const Image& candidate, const Image& origin, double epsilon) {
    if (!(candidate.shape() == origin.shape()))
        throw std::invalid_argument("project_ball: shape mismatch");
    if (!(epsilon > 0.0)) throw std::invalid_argument("project_ball: epsilon must be positive");
    Image out(candidate.shape());
    simd::active().project_clip(candidate.pixels().data(), origin.pixels().data(), epsilon,
                                out.pixels().data(), out.size());
    return out;
}

BlockGrid make_grid(const Shape& shape, int block_size) {
    if (block_size <= 0) throw std::invalid_argument("block size must be positive");
    if (block_size > shape.height || block_size > shape.width)
        throw std::invalid_argument("block size " + std::to_string(block_size) +
                                    " exceeds image side");
    if (shape.height % block_size != 0 || shape.width % block_size != 0)
        throw std::invalid_argument("block size " + std::to_string(block_size) +
                                    " does not divide image " + std::to_string(shape.height) +
                                    "x" + std::to_string(shape.width));
    return BlockGrid{block_size, shape.height / block_size, shape.width / block_size,
                     shape.channels, 0};
}

BlockGrid split_blocks(const BlockGrid& grid) {
    if (grid.block_size < kMinBlockSize || grid.block_size % 2 != 0)
        throw CannotSplit("cannot split blocks of size " + std::to_string(grid.block_size));
    return BlockGrid{grid.block_size / 2, grid.h * 2, grid.w * 2, grid.c, grid.stage + 1};
}

namespace {

void check_block(const Image& x, const BlockGrid& grid, const BlockIndex& block) {
    if (!grid.contains(block)) throw std::invalid_argument("block index outside grid");
    if (grid.h * grid.block_size != x.height() || grid.w * grid.block_size != x.width() ||
        grid.c != x.channels())
        throw std::invalid_argument("grid does not match image shape");
}

}  // namespace

void add_block_delta(Image& x, const BlockGrid& grid, const BlockIndex& block, double amount) {
    check_block(x, grid, block);
    const int b = grid.block_size;
    for (int r = block.i * b; r < (block.i + 1) * b; ++r) {
        double* row = &x.at(block.k, r, block.j * b);
        for (int col = 0; col < b; ++col) row[col] += amount;
    }
}

Image apply_block_delta(const Image& x, const BlockGrid& grid, const BlockIndex& block,
                        double amount) {
    Image out = x;
    add_block_delta(out, grid, block, amount);
    return out;
}

double block_sum(const Image& x, const BlockGrid& grid, const BlockIndex& block) {
    check_block(x, grid, block);
    const int b = grid.block_size;
    double s = 0.0;
    for (int r = block.i * b; r < (block.i + 1) * b; ++r)
        for (int col = block.j * b; col < (block.j + 1) * b; ++col) s += x.at(block.k, r, col);
    return s;
}

double linf_distance(const Image& a, const Image& b) {
    if (!(a.shape() == b.shape())) throw std::invalid_argument("linf_distance: shape mismatch");
    return simd::active().max_abs_diff(a.pixels().data(), b.pixels().data(), a.size());
}

}  // namespace corrattack
