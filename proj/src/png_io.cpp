#include "corrattack/png_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <vector>

#include "corrattack/errors.hpp"

namespace corrattack {

Image load_png(const std::string& path) {
    png_image img;
    std::memset(&img, 0, sizeof img);
    img.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_file(&img, path.c_str()))
        throw DatasetError("cannot decode " + path + ": " + img.message);

    const bool gray = (img.format & PNG_FORMAT_FLAG_COLOR) == 0;
    img.format = gray ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;
    const int channels = gray ? 1 : 3;
    std::vector<std::uint8_t> buf(PNG_IMAGE_SIZE(img));
    if (!png_image_finish_read(&img, nullptr, buf.data(), 0, nullptr)) {
        const std::string msg = img.message;
        png_image_free(&img);
        throw DatasetError("cannot decode " + path + ": " + msg);
    }
    const int h = static_cast<int>(img.height);
    const int w = static_cast<int>(img.width);
    Image out(Shape{channels, h, w});
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c)
            for (int k = 0; k < channels; ++k)
                out.at(k, r, c) = buf[(static_cast<std::size_t>(r) * w + c) * channels + k] / 255.0;
    return out;
}

void save_png(const std::string& path, const Image& image) {
    const int channels = image.channels();
    if (channels != 1 && channels != 3)
        throw DatasetError("save_png: only 1 or 3 channels are supported");
    png_image img;
    std::memset(&img, 0, sizeof img);
    img.version = PNG_IMAGE_VERSION;
    img.width = static_cast<png_uint_32>(image.width());
    img.height = static_cast<png_uint_32>(image.height());
    img.format = channels == 1 ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;

    std::vector<std::uint8_t> buf(PNG_IMAGE_SIZE(img));
    for (int r = 0; r < image.height(); ++r)
        for (int c = 0; c < image.width(); ++c)
            for (int k = 0; k < channels; ++k) {
                const double v = std::clamp(image.at(k, r, c), 0.0, 1.0);
                buf[(static_cast<std::size_t>(r) * image.width() + c) * channels + k] =
                    static_cast<std::uint8_t>(std::lround(v * 255.0));
            }
    if (!png_image_write_to_file(&img, path.c_str(), 0, buf.data(), 0, nullptr))
        throw DatasetError("cannot write " + path + ": " + img.message);
}

}  // namespace corrattack
