#include "corrattack/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "corrattack/errors.hpp"
#include "corrattack/png_io.hpp"

namespace fs = std::filesystem;

namespace corrattack {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    return s.substr(first, s.find_last_not_of(" \t\r") - first + 1);
}

int parse_class(const std::string& field, const std::string& where) {
    int v = 0;
    const char* end = field.data() + field.size();
    const auto [ptr, ec] = std::from_chars(field.data(), end, v);
    if (ec != std::errc() || ptr != end || field.empty())
        throw DatasetError(where + ": bad class '" + field + "'");
    return v;
}

}  // namespace

std::vector<Sample> load_dataset(const std::string& directory, const std::string& labels_path,
                                 const DatasetOptions& options) {
    if (!fs::is_directory(directory)) throw DatasetError("not a directory: " + directory);
    const std::string labels = labels_path.empty() ? directory + "/labels.csv" : labels_path;

    if (!fs::exists(labels)) {
        for (const auto& e : fs::directory_iterator(directory))
            if (e.path().extension() == ".png")
                throw DatasetError("missing labels file " + labels);
        return {};
    }

    std::ifstream in(labels);
    if (!in) throw DatasetError("cannot read " + labels);
    std::map<std::string, std::pair<int, std::optional<int>>> rows;
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const std::string body = trim(raw);
        if (body.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(body);
        std::string f;
        while (std::getline(ss, f, ',')) fields.push_back(trim(f));
        if (line == 1 && !fields.empty() && fields[0] == "file") continue;
        const std::string where = labels + ":" + std::to_string(line);
        if (fields.size() < 2 || fields.size() > 3 || fields[0].empty())
            throw DatasetError(where + ": expected file,label[,target]");
        std::optional<int> target;
        if (fields.size() == 3 && !fields[2].empty()) target = parse_class(fields[2], where);
        const int label = parse_class(fields[1], where);
        for (std::optional<int> c : {std::optional<int>(label), target}) {
            if (!c) continue;
            if (*c < 0 || (options.num_classes && static_cast<std::size_t>(*c) >= *options.num_classes))
                throw DatasetError(where + ": class " + std::to_string(*c) + " out of range");
        }
        if (!rows.emplace(fields[0], std::make_pair(label, target)).second)
            throw DatasetError(where + ": duplicate entry " + fields[0]);
    }

    std::vector<Sample> out;
    out.reserve(rows.size());
    for (const auto& [file, cls] : rows) {
        const fs::path p = fs::path(directory) / file;
        if (!fs::exists(p)) throw DatasetError("missing image " + p.string());
        Image img = load_png(p.string());
        if (options.size && (img.height() != *options.size || img.width() != *options.size))
            img = resize_bilinear(img, *options.size, *options.size);
        out.push_back({file, std::move(img), cls.first, cls.second});
    }
    return out;
}

Image resize_bilinear(const Image& x, int height, int width) {
    if (height <= 0 || width <= 0) throw std::invalid_argument("resize_bilinear: empty target");
    Image out(Shape{x.channels(), height, width});
    const double sy = static_cast<double>(x.height()) / height;
    const double sx = static_cast<double>(x.width()) / width;
    for (int r = 0; r < height; ++r) {
        const double fy = std::clamp((r + 0.5) * sy - 0.5, 0.0, x.height() - 1.0);
        const int y0 = static_cast<int>(fy);
        const int y1 = std::min(y0 + 1, x.height() - 1);
        const double wy = fy - y0;
        for (int c = 0; c < width; ++c) {
            const double fx = std::clamp((c + 0.5) * sx - 0.5, 0.0, x.width() - 1.0);
            const int x0 = static_cast<int>(fx);
            const int x1 = std::min(x0 + 1, x.width() - 1);
            const double wx = fx - x0;
            for (int k = 0; k < x.channels(); ++k) {
                const double top = (1 - wx) * x.at(k, y0, x0) + wx * x.at(k, y0, x1);
                const double bot = (1 - wx) * x.at(k, y1, x0) + wx * x.at(k, y1, x1);
                out.at(k, r, c) = (1 - wy) * top + wy * bot;
            }
        }
    }
    return out;
}

std::vector<Image> generate_noise_images(std::size_t count, Shape shape, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> level(0, 255);
    std::vector<Image> out;
    out.reserve(count);
    for (std::size_t n = 0; n < count; ++n) {
        Image img(shape);
        for (double& v : img.pixels()) v = level(rng) / 255.0;
        out.push_back(std::move(img));
    }
    return out;
}

void write_dataset(const std::string& directory, std::vector<Sample>& samples) {
    fs::create_directories(directory);
    std::ofstream labels(fs::path(directory) / "labels.csv");
    if (!labels) throw DatasetError("cannot write labels in " + directory);
    labels << "file,label,target\n";
    for (std::size_t n = 0; n < samples.size(); ++n) {
        char name[32];
        std::snprintf(name, sizeof name, "img_%03zu.png", n);
        save_png((fs::path(directory) / name).string(), samples[n].image);
        samples[n].id = name;
        labels << name << ',' << samples[n].label << ',';
        if (samples[n].target) labels << *samples[n].target;
        labels << '\n';
    }
}

}  // namespace corrattack
