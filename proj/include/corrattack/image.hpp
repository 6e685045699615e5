#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace corrattack {

struct Shape {
    int channels = 0;
    int height = 0;
    int width = 0;

    std::size_t size() const noexcept {
        return static_cast<std::size_t>(channels) * static_cast<std::size_t>(height) *
               static_cast<std::size_t>(width);
    }
    friend bool operator==(const Shape&, const Shape&) = default;
};

/// Dense C x H x W tensor of intensities, stored row-major in
/// (channel, row, column) order.
class Image {
public:
    Image() = default;
    explicit Image(Shape shape, double fill = 0.0);
    Image(Shape shape, std::vector<double> pixels);

    const Shape& shape() const noexcept { return shape_; }
    int channels() const noexcept { return shape_.channels; }
    int height() const noexcept { return shape_.height; }
    int width() const noexcept { return shape_.width; }
    std::size_t size() const noexcept { return pixels_.size(); }

    std::size_t offset(int c, int r, int col) const noexcept {
        return (static_cast<std::size_t>(c) * shape_.height + r) * shape_.width + col;
    }
    double& at(int c, int r, int col) noexcept { return pixels_[offset(c, r, col)]; }
    double at(int c, int r, int col) const noexcept { return pixels_[offset(c, r, col)]; }

    std::span<double> pixels() noexcept { return pixels_; }
    std::span<const double> pixels() const noexcept { return pixels_; }

    friend bool operator==(const Image&, const Image&) = default;

private:
    Shape shape_;
    std::vector<double> pixels_;
};

struct BlockIndex {
    int i = 0;  // block row
    int j = 0;  // block column
    int k = 0;  // channel
    friend bool operator==(const BlockIndex&, const BlockIndex&) = default;
};

/// Partition of an image into block_size x block_size single-channel blocks.
struct BlockGrid {
    int block_size = 0;
    int h = 0;
    int w = 0;
    int c = 0;
    int stage = 0;

    std::size_t block_count() const noexcept {
        return static_cast<std::size_t>(h) * static_cast<std::size_t>(w) *
               static_cast<std::size_t>(c);
    }
    bool contains(const BlockIndex& b) const noexcept {
        return b.i >= 0 && b.i < h && b.j >= 0 && b.j < w && b.k >= 0 && b.k < c;
    }
    // Channel-major, matching the pixel layout.
    std::size_t linear_index(const BlockIndex& b) const noexcept {
        return (static_cast<std::size_t>(b.k) * h + b.i) * w + b.j;
    }
    BlockIndex block_at(std::size_t linear) const noexcept {
        const auto plane = static_cast<std::size_t>(h) * w;
        const auto rem = linear % plane;
        return {static_cast<int>(rem / w), static_cast<int>(rem % w),
                static_cast<int>(linear / plane)};
    }
    friend bool operator==(const BlockGrid&, const BlockGrid&) = default;
};

inline constexpr int kMinBlockSize = 2;

/// Clips every pixel into [origin - eps, origin + eps] and then into [0, 1].
Image project_ball(const Image& candidate, const Image& origin, double epsilon);

/// Throws std::invalid_argument unless block_size divides both image sides.
BlockGrid make_grid(const Shape& shape, int block_size);

/// Quarters every block. Throws CannotSplit below kMinBlockSize.
BlockGrid split_blocks(const BlockGrid& grid);

Image apply_block_delta(const Image& x, const BlockGrid& grid, const BlockIndex& block,
                        double amount);

/// In-place variant used on hot paths.
void add_block_delta(Image& x, const BlockGrid& grid, const BlockIndex& block, double amount);

/// Sum of the pixels of one block.
double block_sum(const Image& x, const BlockGrid& grid, const BlockIndex& block);

/// max |a - b| over all pixels; shapes must match.
double linf_distance(const Image& a, const Image& b);

}  // namespace corrattack
