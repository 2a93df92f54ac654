#pragma once

// Class maps as binary PPM (P6, maxval 255).
//
// Palette: 0 yellow (255,255,0), 1 light blue (173,216,230), 2 orange
// (255,165,0), 3 red (255,0,0), then green, magenta, cyan, grey, purple,
// brown, cycling for larger ids. UNLABELED and margin pixels are black.

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "rrfnn/cube.hpp"
#include "rrfnn/model.hpp"

namespace rrfnn {

using Rgb = std::array<std::uint8_t, 3>;

Rgb class_color(std::uint8_t class_id);

/// Complete PPM file contents for a row-major class map.
std::string encode_ppm(std::span<const std::uint8_t> classes, std::size_t height, std::size_t width);
void write_ppm(std::span<const std::uint8_t> classes, std::size_t height, std::size_t width,
               const std::filesystem::path& path);

/// Ground truth restricted to the pixels a side-s model can classify.
std::vector<std::uint8_t> interior_labels(const LabelMap& labels, std::size_t side);

/// Predicted class of every labeled interior pixel; everything else is
/// UNLABELED. The cube must already be normalized.
std::vector<std::uint8_t> prediction_map(const RankRFNN& model, const HyperCube& cube, const LabelMap& labels);
std::vector<std::uint8_t> prediction_map(const DenseFNN& model, const HyperCube& cube, const LabelMap& labels);

}  // namespace rrfnn
