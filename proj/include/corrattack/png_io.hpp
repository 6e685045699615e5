#pragma once

#include <string>

#include "corrattack/image.hpp"

namespace corrattack {

/// Decodes an 8-bit PNG into [0,1] intensities. Grayscale files load as one
/// channel, everything else as RGB (alpha dropped). Throws DatasetError.
Image load_png(const std::string& path);

/// Writes a 1- or 3-channel image as 8-bit PNG, rounding v * 255 to the
/// nearest level after clamping to [0,1]. Throws DatasetError.
void save_png(const std::string& path, const Image& image);

}  // namespace corrattack
