#include "rrfnn/render.hpp"

#include <fstream>

#include "rrfnn/errors.hpp"
#include "rrfnn/evaluate.hpp"

namespace rrfnn {

namespace {

constexpr std::array<Rgb, 10> kPalette{{
    {255, 255, 0},
    {173, 216, 230},
    {255, 165, 0},
    {255, 0, 0},
    {0, 160, 0},
    {255, 0, 255},
    {0, 255, 255},
    {128, 128, 128},
    {128, 0, 128},
    {139, 69, 19},
}};

void check_size(std::size_t values, std::size_t height, std::size_t width) {
    if (values != height * width) {
        throw ShapeError("class map holds " + std::to_string(values) + " pixels, expected " +
                         std::to_string(height) + "x" + std::to_string(width));
    }
}

template <class Model>
std::vector<std::uint8_t> masked_prediction(const Model& model, const HyperCube& cube, const LabelMap& labels) {
    if (cube.height() != labels.height() || cube.width() != labels.width()) {
        throw ShapeError("cube and label map sizes differ");
    }
    std::vector<std::uint8_t> map = predict_image(model, cube);
    for (std::size_t n = 0; n < map.size(); ++n) {
        if (labels.values()[n] == kUnlabeled) map[n] = kUnlabeled;
    }
    return map;
}

}  // namespace

Rgb class_color(std::uint8_t class_id) {
    if (class_id == kUnlabeled) return {0, 0, 0};
    return kPalette[class_id % kPalette.size()];
}

std::string encode_ppm(std::span<const std::uint8_t> classes, std::size_t height, std::size_t width) {
    check_size(classes.size(), height, width);
    std::string out = "P6\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
    const std::size_t header = out.size();
    out.resize(header + 3 * classes.size());
    for (std::size_t n = 0; n < classes.size(); ++n) {
        const Rgb c = class_color(classes[n]);
        for (std::size_t k = 0; k < 3; ++k) out[header + 3 * n + k] = static_cast<char>(c[k]);
    }
    return out;
}

void write_ppm(std::span<const std::uint8_t> classes, std::size_t height, std::size_t width,
               const std::filesystem::path& path) {
    const std::string bytes = encode_ppm(classes, height, width);
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) throw IoError("cannot open " + path.string() + " for writing");
    file.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!file) throw IoError("failed writing " + path.string());
}

std::vector<std::uint8_t> interior_labels(const LabelMap& labels, std::size_t side) {
    std::vector<std::uint8_t> out(labels.values().begin(), labels.values().end());
    for (std::size_t r = 0; r < labels.height(); ++r) {
        for (std::size_t c = 0; c < labels.width(); ++c) {
            if (!has_patch(labels.height(), labels.width(), r, c, side)) out[r * labels.width() + c] = kUnlabeled;
        }
    }
    return out;
}

std::vector<std::uint8_t> prediction_map(const RankRFNN& model, const HyperCube& cube, const LabelMap& labels) {
    return masked_prediction(model, cube, labels);
}

std::vector<std::uint8_t> prediction_map(const DenseFNN& model, const HyperCube& cube, const LabelMap& labels) {
    return masked_prediction(model, cube, labels);
}

}  // namespace rrfnn
