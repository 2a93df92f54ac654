#pragma once

// Hyperspectral cubes, label maps and patch extraction.
//
// HyperCube stores values band-slowest, then row, then column, which is also
// the on-disk order of HSCUBE1 files. A patch cut around (row, col) is a
// Tensor3 of dims (bands, s, s) with
//
//     patch(m, j, i) = cube(row - s/2 + j, col - s/2 + i, m)
//
// Only pixels at least s/2 away from every border have a patch.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rrfnn/tensor.hpp"

namespace rrfnn {

inline constexpr std::uint8_t kUnlabeled = 255;

class HyperCube {
public:
    HyperCube() = default;
    /// Zero-filled cube.
    HyperCube(std::size_t height, std::size_t width, std::size_t bands);
    /// `values` in band, row, column order; must be finite.
    HyperCube(std::size_t height, std::size_t width, std::size_t bands, std::vector<double> values);

    std::size_t height() const noexcept { return height_; }
    std::size_t width() const noexcept { return width_; }
    std::size_t bands() const noexcept { return bands_; }

    double operator()(std::size_t row, std::size_t col, std::size_t band) const noexcept {
        return values_[(band * height_ + row) * width_ + col];
    }
    double& operator()(std::size_t row, std::size_t col, std::size_t band) noexcept {
        return values_[(band * height_ + row) * width_ + col];
    }

    /// One band as a height x width row-major plane.
    std::span<const double> band(std::size_t m) const {
        return std::span(values_).subspan(m * height_ * width_, height_ * width_);
    }
    std::span<double> band(std::size_t m) { return std::span(values_).subspan(m * height_ * width_, height_ * width_); }

    std::span<const double> values() const noexcept { return values_; }
    std::span<double> values() noexcept { return values_; }

    /// Optional, not persisted by HSCUBE1 files.
    std::vector<std::string> band_names;

private:
    std::size_t height_ = 0;
    std::size_t width_ = 0;
    std::size_t bands_ = 0;
    std::vector<double> values_;
};

class LabelMap {
public:
    LabelMap() = default;
    /// Every pixel starts UNLABELED.
    LabelMap(std::size_t height, std::size_t width);
    LabelMap(std::size_t height, std::size_t width, std::vector<std::uint8_t> labels);

    std::size_t height() const noexcept { return height_; }
    std::size_t width() const noexcept { return width_; }
    std::uint8_t operator()(std::size_t row, std::size_t col) const noexcept { return labels_[row * width_ + col]; }
    std::uint8_t& operator()(std::size_t row, std::size_t col) noexcept { return labels_[row * width_ + col]; }
    std::span<const std::uint8_t> values() const noexcept { return labels_; }

    /// Per-class pixel counts for classes 0..classes-1; throws InvalidArgument
    /// if a labeled pixel has an id >= classes.
    std::vector<std::size_t> class_counts(std::size_t classes) const;

private:
    std::size_t height_ = 0;
    std::size_t width_ = 0;
    std::vector<std::uint8_t> labels_;
};

struct PixelOrigin {
    std::size_t row = 0;
    std::size_t col = 0;
    friend bool operator==(const PixelOrigin&, const PixelOrigin&) = default;
};

struct PatchTensor {
    Tensor3 tensor;
    std::vector<double> label;  // one-hot
    PixelOrigin origin;

    std::size_t class_id() const;
};

/// Per-band min-max scaling to [0, 1] over the whole cube. A constant band maps
/// to 0.
HyperCube normalize_bandwise(const HyperCube& cube);

/// True when (row, col) has a full s x s neighbourhood inside the cube.
bool has_patch(std::size_t height, std::size_t width, std::size_t row, std::size_t col, std::size_t side);

/// Throws InvalidArgument for an even side and OutOfBounds (naming the margin)
/// when the pixel is closer than s/2 to a border.
Tensor3 extract_patch(const HyperCube& cube, std::size_t row, std::size_t col, std::size_t side);

/// Same as extract_patch, writing into `out` (bands * side * side values).
void extract_patch_into(const HyperCube& cube, std::size_t row, std::size_t col, std::size_t side,
                        std::span<double> out);

}  // namespace rrfnn
