#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "corrattack/image.hpp"

namespace corrattack {

struct Sample {
    std::string id;  // file name
    Image image;
    int label = 0;
    std::optional<int> target;
};

struct DatasetOptions {
    std::optional<int> size;                 // resize to size x size (bilinear)
    std::optional<std::size_t> num_classes;  // range-check labels and targets
};

/// Reads `labels_path` (rows "file,label[,target]", optional header row
/// starting with "file") and the named PNGs under `directory`, ordered by
/// file name. A directory without PNG files and without a labels file is an
/// empty dataset. Throws DatasetError on a missing or undecodable file, a
/// malformed row, or an out-of-range class.
std::vector<Sample> load_dataset(const std::string& directory, const std::string& labels_path,
                                 const DatasetOptions& options = {});

/// Bilinear resampling with half-pixel centres.
Image resize_bilinear(const Image& x, int height, int width);

/// Seeded uniform-noise images with every pixel on the 8-bit grid k/255, so
/// they survive a PNG round trip unchanged.
std::vector<Image> generate_noise_images(std::size_t count, Shape shape, std::uint64_t seed);

/// Writes img_NNN.png files and labels.csv; ids are replaced by the written
/// file names.
void write_dataset(const std::string& directory, std::vector<Sample>& samples);

}  // namespace corrattack
