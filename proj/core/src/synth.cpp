#include "rrfnn/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "rrfnn/errors.hpp"
#include "rrfnn/random.hpp"

namespace rrfnn {

namespace {

// Shared baseline: a gentle ramp with one broad bump.
constexpr double kBaseOffset = 0.35;
constexpr double kBaseSlope = 0.25;
constexpr double kBaseBumpAmplitude = 0.15;
constexpr double kBaseBumpCentre = 0.55;
constexpr double kBaseBumpWidth = 0.14;

// Class-specific bumps.
constexpr double kBumpScale = 0.1;
constexpr double kMinBumpWidth = 0.06;
constexpr double kMaxBumpWidth = 0.18;
constexpr std::size_t kMaxBumps = 3;

double gaussian(double t, double centre, double width) {
    const double d = (t - centre) / width;
    return std::exp(-0.5 * d * d);
}

double band_position(std::size_t m, std::size_t bands) {
    return bands > 1 ? static_cast<double>(m) / static_cast<double>(bands - 1) : 0.0;
}

std::vector<std::vector<double>> make_signatures(const SceneConfig& cfg, Rng& rng) {
    std::vector<double> baseline(cfg.bands);
    for (std::size_t m = 0; m < cfg.bands; ++m) {
        const double t = band_position(m, cfg.bands);
        baseline[m] = kBaseOffset + kBaseSlope * t + kBaseBumpAmplitude * gaussian(t, kBaseBumpCentre, kBaseBumpWidth);
    }

    std::vector<std::vector<double>> signatures(cfg.classes, baseline);
    for (auto& sig : signatures) {
        const std::size_t bumps = 2 + static_cast<std::size_t>(rng.below(2));
        for (std::size_t n = 0; n < bumps; ++n) {
            const double centre = rng.uniform();
            const double width = rng.uniform(kMinBumpWidth, kMaxBumpWidth);
            const double sign = rng.below(2) == 0 ? 1.0 : -1.0;
            const double amplitude = sign * rng.uniform(0.5, 1.0);
            for (std::size_t m = 0; m < cfg.bands; ++m) {
                const double t = band_position(m, cfg.bands);
                sig[m] += cfg.signature_separation * kBumpScale * amplitude * gaussian(t, centre, width);
            }
        }
    }
    return signatures;
}

LabelMap make_regions(const SceneConfig& cfg, Rng& rng) {
    const double area = static_cast<double>(cfg.height * cfg.width);
    const auto wanted = static_cast<std::size_t>(std::llround(area / (cfg.region_granularity * cfg.region_granularity)));
    const std::size_t sites = std::max(cfg.classes, wanted);

    std::vector<double> site_row(sites), site_col(sites);
    for (std::size_t n = 0; n < sites; ++n) {
        site_row[n] = rng.uniform(0.0, static_cast<double>(cfg.height));
        site_col[n] = rng.uniform(0.0, static_cast<double>(cfg.width));
    }

    std::vector<std::uint8_t> site_class(sites);
    std::vector<std::uint8_t> first(cfg.classes);
    std::iota(first.begin(), first.end(), std::uint8_t{0});
    shuffle(std::span(first), rng);
    std::copy(first.begin(), first.end(), site_class.begin());

    std::vector<double> prior(cfg.classes, 1.0);
    prior[cfg.majority_class] = cfg.majority_weight;
    const double total = std::accumulate(prior.begin(), prior.end(), 0.0);
    for (std::size_t n = cfg.classes; n < sites; ++n) {
        double u = rng.uniform() * total;
        std::size_t c = 0;
        while (c + 1 < cfg.classes && u >= prior[c]) u -= prior[c++];
        site_class[n] = static_cast<std::uint8_t>(c);
    }

    LabelMap labels(cfg.height, cfg.width);
    for (std::size_t r = 0; r < cfg.height; ++r) {
        for (std::size_t c = 0; c < cfg.width; ++c) {
            const double pr = static_cast<double>(r) + 0.5;
            const double pc = static_cast<double>(c) + 0.5;
            std::size_t best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (std::size_t n = 0; n < sites; ++n) {
                const double dr = pr - site_row[n];
                const double dc = pc - site_col[n];
                const double d = dr * dr + dc * dc;
                if (d < best_d) {
                    best_d = d;
                    best = n;
                }
            }
            labels(r, c) = site_class[best];
        }
    }
    return labels;
}

// In-bounds box mean of one band, separable.
void box_blur(std::span<double> plane, std::size_t height, std::size_t width, std::size_t radius) {
    std::vector<double> tmp(plane.size());
    const auto r = static_cast<std::ptrdiff_t>(radius);
    const auto H = static_cast<std::ptrdiff_t>(height);
    const auto W = static_cast<std::ptrdiff_t>(width);
    for (std::ptrdiff_t y = 0; y < H; ++y) {
        for (std::ptrdiff_t x = 0; x < W; ++x) {
            const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, x - r);
            const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(W - 1, x + r);
            double sum = 0.0;
            for (std::ptrdiff_t k = lo; k <= hi; ++k) sum += plane[static_cast<std::size_t>(y * W + k)];
            tmp[static_cast<std::size_t>(y * W + x)] = sum / static_cast<double>(hi - lo + 1);
        }
    }
    for (std::ptrdiff_t y = 0; y < H; ++y) {
        const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, y - r);
        const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(H - 1, y + r);
        for (std::ptrdiff_t x = 0; x < W; ++x) {
            double sum = 0.0;
            for (std::ptrdiff_t k = lo; k <= hi; ++k) sum += tmp[static_cast<std::size_t>(k * W + x)];
            plane[static_cast<std::size_t>(y * W + x)] = sum / static_cast<double>(hi - lo + 1);
        }
    }
}

}  // namespace

void SceneConfig::validate() const {
    if (height == 0 || width == 0) throw InvalidArgument("scene height and width must be positive");
    if (bands == 0) throw InvalidArgument("scene band count must be positive");
    if (classes < 2) throw InvalidArgument("scene needs at least 2 classes, got " + std::to_string(classes));
    if (classes >= kUnlabeled) throw InvalidArgument("scene supports at most 254 classes");
    if (!(region_granularity > 0.0)) throw InvalidArgument("region granularity must be positive");
    if (!(signature_separation >= 0.0)) throw InvalidArgument("signature separation must be non-negative");
    if (!(noise_std >= 0.0)) throw InvalidArgument("noise std must be non-negative");
    if (!(brightness_jitter >= 0.0)) throw InvalidArgument("brightness jitter must be non-negative");
    if (majority_class >= classes) throw InvalidArgument("majority class must be a valid class id");
    if (!(majority_weight > 0.0)) throw InvalidArgument("majority weight must be positive");
}

Scene generate_scene(const SceneConfig& cfg) {
    cfg.validate();
    Rng rng(derive_seed({cfg.seed, 0x5343454E45ULL}));

    Scene scene;
    scene.signatures = make_signatures(cfg, rng);
    scene.labels = make_regions(cfg, rng);
    scene.cube = HyperCube(cfg.height, cfg.width, cfg.bands);

    for (std::size_t r = 0; r < cfg.height; ++r) {
        for (std::size_t c = 0; c < cfg.width; ++c) {
            const auto& sig = scene.signatures[scene.labels(r, c)];
            const double brightness = std::exp(cfg.brightness_jitter * rng.normal());
            for (std::size_t m = 0; m < cfg.bands; ++m) {
                scene.cube(r, c, m) = brightness * sig[m] + cfg.noise_std * rng.normal();
            }
        }
    }
    if (cfg.spatial_blur > 0) {
        for (std::size_t m = 0; m < cfg.bands; ++m) box_blur(scene.cube.band(m), cfg.height, cfg.width, cfg.spatial_blur);
    }
    return scene;
}

double signature_curvature_bound(const SceneConfig& cfg) {
    if (cfg.bands < 3) return 0.0;
    const double dt = 1.0 / static_cast<double>(cfg.bands - 1);
    // |g''| <= A / w^2 for a Gaussian bump of amplitude A and width w.
    const double base = kBaseBumpAmplitude / (kBaseBumpWidth * kBaseBumpWidth);
    const double bumps = cfg.signature_separation * kBumpScale * static_cast<double>(kMaxBumps) /
                         (kMinBumpWidth * kMinBumpWidth);
    return dt * dt * (base + bumps);
}

double scene_difficulty(const HyperCube& cube, const LabelMap& labels, std::uint64_t seed, std::size_t subsample) {
    if (cube.height() != labels.height() || cube.width() != labels.width()) {
        throw ShapeError("cube and label map sizes differ");
    }
    std::vector<std::size_t> pixels;
    std::size_t classes = 0;
    for (std::size_t n = 0; n < labels.values().size(); ++n) {
        const std::uint8_t l = labels.values()[n];
        if (l == kUnlabeled) continue;
        pixels.push_back(n);
        classes = std::max<std::size_t>(classes, l + 1u);
    }
    if (pixels.empty()) return 0.0;

    if (pixels.size() > subsample) {
        Rng rng(derive_seed({seed, 0x4449464649ULL}));
        for (std::size_t t = 0; t < subsample; ++t) {
            const std::size_t j = t + static_cast<std::size_t>(rng.below(pixels.size() - t));
            std::swap(pixels[t], pixels[j]);
        }
        pixels.resize(subsample);
    }

    const std::size_t B = cube.bands();
    const std::size_t plane = cube.height() * cube.width();
    std::vector<double> spectra(pixels.size() * B);
    std::vector<std::size_t> cls(pixels.size());
    std::vector<double> sums(classes * B, 0.0);
    std::vector<std::size_t> counts(classes, 0);
    for (std::size_t p = 0; p < pixels.size(); ++p) {
        cls[p] = labels.values()[pixels[p]];
        ++counts[cls[p]];
        for (std::size_t m = 0; m < B; ++m) {
            const double v = cube.values()[m * plane + pixels[p]];
            spectra[p * B + m] = v;
            sums[cls[p] * B + m] += v;
        }
    }

    std::size_t correct = 0;
    for (std::size_t p = 0; p < pixels.size(); ++p) {
        const double* x = spectra.data() + p * B;
        std::size_t best = classes;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < classes; ++c) {
            const bool own = c == cls[p];
            const std::size_t n = counts[c] - (own ? 1 : 0);
            if (n == 0) continue;
            double d = 0.0;
            for (std::size_t m = 0; m < B; ++m) {
                const double centroid = (sums[c * B + m] - (own ? x[m] : 0.0)) / static_cast<double>(n);
                const double diff = x[m] - centroid;
                d += diff * diff;
            }
            if (d < best_d) {
                best_d = d;
                best = c;
            }
        }
        if (best == cls[p]) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(pixels.size());
}

}  // namespace rrfnn
