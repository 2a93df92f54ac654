#pragma once

// Binary model files.
//
//   magic      6 bytes, "RRFNN1" (Rank-R) or "DNFNN1" (dense)
//   header     7 x u32 little-endian: Q, R, C, s, b, activation id, bias flag
//              (R is written as 0 for dense models)
//   payload    every parameter as little-endian float64, in the flat layout
//              documented in model.hpp
//
// The file size must match the header exactly.

#include <filesystem>
#include <variant>

#include "rrfnn/model.hpp"

namespace rrfnn {

using AnyModel = std::variant<RankRFNN, DenseFNN>;

void save_model(const RankRFNN& model, const std::filesystem::path& path);
void save_model(const DenseFNN& model, const std::filesystem::path& path);

/// Throws FormatError on a malformed file and IoError if it cannot be read.
AnyModel load_model(const std::filesystem::path& path);

}  // namespace rrfnn
