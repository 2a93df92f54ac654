#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "rrfnn/cube.hpp"
#include "rrfnn/model.hpp"
#include "rrfnn/sampling.hpp"

namespace rrfnn {

struct Evaluation {
    /// confusion[true][predicted]
    std::vector<std::vector<std::size_t>> confusion;
    std::vector<std::size_t> class_totals;
    /// correct_c / total_c; 0 for a class absent from the test set.
    std::vector<double> per_class_accuracy;
    double overall_accuracy = 0.0;
    std::size_t total = 0;
};

/// Builds the confusion matrix and accuracies from paired class ids.
Evaluation tally(std::span<const std::size_t> truth, std::span<const std::size_t> predicted, std::size_t classes);

/// Classifies every patch with predict(). Throws InvalidArgument on an empty
/// test set.
Evaluation evaluate(const RankRFNN& model, const PatchSource& test);
Evaluation evaluate(const DenseFNN& model, const PatchSource& test);

/// Same result for pool subsets, computed from whole-image prediction maps.
Evaluation evaluate(const RankRFNN& model, const PoolSubset& test);
Evaluation evaluate(const DenseFNN& model, const PoolSubset& test);

/// Class id of every pixel with a full patch, kUnlabeled on the margin.
/// The Rank-R version evaluates each term as a spectral projection of the cube
/// followed by a separable row/column filter, in the same order of operations
/// as cp_inner.
std::vector<std::uint8_t> predict_image(const RankRFNN& model, const HyperCube& cube);
std::vector<std::uint8_t> predict_image(const DenseFNN& model, const HyperCube& cube);

}  // namespace rrfnn
