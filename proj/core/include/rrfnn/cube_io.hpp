#pragma once

// HSCUBE1 / HSLBL1 files.
//
//   cube:   "HSCUBE1", u32 H, u32 W, u32 B, u8 dtype (0 = float32, 1 = float64),
//           then H*W*B values, band-slowest, then row, then column
//   labels: "HSLBL1",  u32 H, u32 W, u32 B (= 1), u8 dtype (2 = uint8),
//           then H*W bytes row-major, 255 = UNLABELED
//
// All integers and floats are little-endian. Loading reads the whole file
// and either returns a complete object or throws FormatError with the byte
// offset of the problem.

#include <cstdint>
#include <filesystem>

#include "rrfnn/cube.hpp"

namespace rrfnn {

enum class CubeDtype : std::uint8_t { float32 = 0, float64 = 1 };

HyperCube load_cube(const std::filesystem::path& path);
void save_cube(const HyperCube& cube, const std::filesystem::path& path, CubeDtype dtype = CubeDtype::float64);

LabelMap load_labels(const std::filesystem::path& path);
void save_labels(const LabelMap& labels, const std::filesystem::path& path);

/// Headerless float32 little-endian band-sequential file, as produced by many
/// sensor toolchains.
HyperCube load_raw_bsq_float32(const std::filesystem::path& path, std::size_t height, std::size_t width,
                               std::size_t bands);
/// Headerless uint8 row-major label file.
LabelMap load_raw_labels_u8(const std::filesystem::path& path, std::size_t height, std::size_t width);

}  // namespace rrfnn
