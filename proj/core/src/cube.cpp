#include "rrfnn/cube.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rrfnn/errors.hpp"

namespace rrfnn {

HyperCube::HyperCube(std::size_t height, std::size_t width, std::size_t bands)
    : height_(height), width_(width), bands_(bands) {
    if (height == 0 || width == 0 || bands == 0) throw InvalidArgument("cube dimensions must be positive");
    values_.assign(height * width * bands, 0.0);
}

HyperCube::HyperCube(std::size_t height, std::size_t width, std::size_t bands, std::vector<double> values)
    : height_(height), width_(width), bands_(bands), values_(std::move(values)) {
    if (height == 0 || width == 0 || bands == 0) throw InvalidArgument("cube dimensions must be positive");
    if (values_.size() != height * width * bands) {
        throw ShapeError("cube of " + std::to_string(height) + "x" + std::to_string(width) + "x" +
                         std::to_string(bands) + " needs " + std::to_string(height * width * bands) +
                         " values, got " + std::to_string(values_.size()));
    }
    for (double v : values_) {
        if (!std::isfinite(v)) throw InvalidArgument("cube values must be finite");
    }
}

LabelMap::LabelMap(std::size_t height, std::size_t width)
    : height_(height), width_(width), labels_(height * width, kUnlabeled) {
    if (height == 0 || width == 0) throw InvalidArgument("label map dimensions must be positive");
}

LabelMap::LabelMap(std::size_t height, std::size_t width, std::vector<std::uint8_t> labels)
    : height_(height), width_(width), labels_(std::move(labels)) {
    if (height == 0 || width == 0) throw InvalidArgument("label map dimensions must be positive");
    if (labels_.size() != height * width) {
        throw ShapeError("label map of " + std::to_string(height) + "x" + std::to_string(width) + " needs " +
                         std::to_string(height * width) + " labels, got " + std::to_string(labels_.size()));
    }
}

std::vector<std::size_t> LabelMap::class_counts(std::size_t classes) const {
    std::vector<std::size_t> counts(classes, 0);
    for (std::uint8_t l : labels_) {
        if (l == kUnlabeled) continue;
        if (l >= classes) {
            throw InvalidArgument("label " + std::to_string(l) + " is not a valid class id for " +
                                  std::to_string(classes) + " classes");
        }
        ++counts[l];
    }
    return counts;
}

std::size_t PatchTensor::class_id() const {
    return static_cast<std::size_t>(std::find(label.begin(), label.end(), 1.0) - label.begin());
}

HyperCube normalize_bandwise(const HyperCube& cube) {
    HyperCube out = cube;
    for (std::size_t m = 0; m < cube.bands(); ++m) {
        auto band = out.band(m);
        const auto [lo_it, hi_it] = std::minmax_element(band.begin(), band.end());
        const double lo = *lo_it;
        const double range = *hi_it - lo;
        if (range == 0.0) {
            std::fill(band.begin(), band.end(), 0.0);
            continue;
        }
        for (double& v : band) v = (v - lo) / range;
    }
    return out;
}

bool has_patch(std::size_t height, std::size_t width, std::size_t row, std::size_t col, std::size_t side) {
    const std::size_t half = side / 2;
    return row >= half && col >= half && row + half < height && col + half < width;
}

void extract_patch_into(const HyperCube& cube, std::size_t row, std::size_t col, std::size_t side,
                        std::span<double> out) {
    if (side % 2 == 0) throw InvalidArgument("patch side must be odd, got " + std::to_string(side));
    if (!has_patch(cube.height(), cube.width(), row, col, side)) {
        throw OutOfBounds("pixel (" + std::to_string(row) + ", " + std::to_string(col) + ") is within the " +
                          std::to_string(side / 2) + "-pixel margin of a " + std::to_string(cube.height()) + "x" +
                          std::to_string(cube.width()) + " cube for patch side " + std::to_string(side));
    }
    if (out.size() != cube.bands() * side * side) throw ShapeError("patch buffer has the wrong size");

    const std::size_t half = side / 2;
    const std::size_t width = cube.width();
    double* dst = out.data();
    for (std::size_t m = 0; m < cube.bands(); ++m) {
        const double* plane = cube.band(m).data();
        for (std::size_t j = 0; j < side; ++j) {
            const double* src = plane + (row - half + j) * width + (col - half);
            dst = std::copy(src, src + side, dst);
        }
    }
}

Tensor3 extract_patch(const HyperCube& cube, std::size_t row, std::size_t col, std::size_t side) {
    if (side % 2 == 0) throw InvalidArgument("patch side must be odd, got " + std::to_string(side));
    Tensor3 patch(Dims3{cube.bands(), side, side});
    extract_patch_into(cube, row, col, side, patch.values());
    return patch;
}

}  // namespace rrfnn
