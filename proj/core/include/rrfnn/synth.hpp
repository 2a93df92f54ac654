#pragma once

// Seeded synthetic hyperspectral scenes with known ground truth.
//
// Generation steps, all driven by one seed:
//   1. scatter round(H W / granularity^2) sites (at least C) uniformly and
//      assign every pixel to its nearest site, giving contiguous regions;
//   2. give the first C sites a random permutation of the classes and every
//      other site a class drawn from the class prior (uniform, except class
//      `majority_class` which has weight `majority_weight`);
//   3. build one spectral signature per class: a shared smooth baseline plus
//      separation * 0.1 * (2 or 3 Gaussian bumps over the band axis with
//      seeded centres, widths and signed amplitudes);
//   4. pixel spectrum = brightness * signature + N(0, noise_std^2) per band,
//      with brightness = exp(brightness_jitter * N(0, 1)) per pixel;
//   5. box-blur every band with the given radius (edge pixels average only
//      the in-bounds part of the window);
//   6. label every pixel with its region's class.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "rrfnn/cube.hpp"

namespace rrfnn {

struct SceneConfig {
    std::size_t height = 128;
    std::size_t width = 128;
    std::size_t bands = 42;
    std::size_t classes = 4;
    double region_granularity = 24.0;  ///< expected region diameter, pixels
    double signature_separation = 1.4;
    double noise_std = 0.06;
    double brightness_jitter = 0.05;
    std::size_t spatial_blur = 0;  ///< box radius; 0 disables
    std::size_t majority_class = 1;
    double majority_weight = 1.5;
    std::uint64_t seed = 20220916;

    /// Throws InvalidArgument on a config that cannot be rendered.
    void validate() const;
};

struct Scene {
    HyperCube cube;
    LabelMap labels;
    std::vector<std::vector<double>> signatures;  ///< classes x bands
};

Scene generate_scene(const SceneConfig& config);

/// Upper bound on |s[m+1] - 2 s[m] + s[m-1]| for every class signature the
/// config can produce.
double signature_curvature_bound(const SceneConfig& config);

/// Leave-one-out nearest-centroid accuracy of single-pixel spectra on a seeded
/// subsample of labeled pixels (all of them if fewer than `subsample`). A
/// model-free separability score in [0, 1]; pass the normalized cube.
double scene_difficulty(const HyperCube& cube, const LabelMap& labels, std::uint64_t seed = 0,
                        std::size_t subsample = 1000);

}  // namespace rrfnn
