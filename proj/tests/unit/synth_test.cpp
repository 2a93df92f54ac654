#include <gtest/gtest.h>

#include <cmath>

#include "rrfnn/errors.hpp"
#include "rrfnn/synth.hpp"

using namespace rrfnn;

TEST(Synth, DeterministicForFixedConfig) {
    SceneConfig cfg;
    cfg.height = cfg.width = 48;
    const Scene a = generate_scene(cfg);
    const Scene b = generate_scene(cfg);
    EXPECT_TRUE(std::equal(a.cube.values().begin(), a.cube.values().end(), b.cube.values().begin()));
    EXPECT_TRUE(std::equal(a.labels.values().begin(), a.labels.values().end(), b.labels.values().begin()));
    cfg.seed += 1;
    const Scene c = generate_scene(cfg);
    EXPECT_FALSE(std::equal(a.cube.values().begin(), a.cube.values().end(), c.cube.values().begin()));
}

TEST(Synth, DefaultSceneIsFullyLabeledAndCoversEveryClass) {
    const SceneConfig cfg;
    const Scene s = generate_scene(cfg);
    EXPECT_EQ(s.cube.height(), 128u);
    EXPECT_EQ(s.cube.width(), 128u);
    EXPECT_EQ(s.cube.bands(), 42u);
    std::vector<std::size_t> recount(4, 0);
    for (std::size_t r = 0; r < 128; ++r)
        for (std::size_t c = 0; c < 128; ++c) {
            ASSERT_NE(s.labels(r, c), kUnlabeled);
            ASSERT_LT(s.labels(r, c), 4);
            ++recount[s.labels(r, c)];
        }
    EXPECT_EQ(s.labels.class_counts(4), recount);
    for (std::size_t n : recount) EXPECT_GT(n, 0u);
}

TEST(Synth, RegionsAreContiguousBlobs) {
    // Nearest-site regions: most 4-neighbours share a label.
    const Scene s = generate_scene(SceneConfig{});
    std::size_t same = 0, total = 0;
    for (std::size_t r = 0; r + 1 < 128; ++r)
        for (std::size_t c = 0; c + 1 < 128; ++c) {
            same += s.labels(r, c) == s.labels(r + 1, c);
            same += s.labels(r, c) == s.labels(r, c + 1);
            total += 2;
        }
    EXPECT_GT(static_cast<double>(same) / static_cast<double>(total), 0.9);
}

TEST(Synth, NoiselessPixelsEqualTheirSignature) {
    SceneConfig cfg;
    cfg.height = cfg.width = 40;
    cfg.noise_std = 0.0;
    cfg.brightness_jitter = 0.0;
    cfg.signature_separation = 5.0;
    const Scene s = generate_scene(cfg);
    for (std::size_t r = 0; r < 40; ++r)
        for (std::size_t c = 0; c < 40; ++c)
            for (std::size_t m = 0; m < cfg.bands; ++m) ASSERT_EQ(s.cube(r, c, m), s.signatures[s.labels(r, c)][m]);
    EXPECT_EQ(scene_difficulty(normalize_bandwise(s.cube), s.labels), 1.0);
}

TEST(Synth, ZeroSeparationIsChanceLevel) {
    SceneConfig cfg;
    cfg.signature_separation = 0.0;
    const Scene s = generate_scene(cfg);
    for (std::size_t c = 1; c < cfg.classes; ++c) EXPECT_EQ(s.signatures[c], s.signatures[0]);
    EXPECT_NEAR(scene_difficulty(normalize_bandwise(s.cube), s.labels), 0.25, 0.05);
}

TEST(Synth, DifficultyDropsWithNoise) {
    SceneConfig cfg;
    cfg.noise_std = 0.1;
    const Scene quiet = generate_scene(cfg);
    cfg.noise_std = 0.5;
    const Scene loud = generate_scene(cfg);
    EXPECT_GE(scene_difficulty(normalize_bandwise(quiet.cube), quiet.labels),
              scene_difficulty(normalize_bandwise(loud.cube), loud.labels));
}

TEST(Synth, DefaultSceneDifficultyIsInCalibratedRange) {
    const Scene s = generate_scene(SceneConfig{});
    const double d = scene_difficulty(normalize_bandwise(s.cube), s.labels);
    EXPECT_GE(d, 0.80);
    EXPECT_LE(d, 0.95);
}

TEST(Synth, SignatureSecondDifferenceIsBounded) {
    for (double sep : {0.0, 1.0, 3.0}) {
        for (std::uint64_t seed : {1u, 2u, 3u, 4u}) {
            SceneConfig cfg;
            cfg.height = cfg.width = 8;
            cfg.signature_separation = sep;
            cfg.seed = seed;
            const double bound = signature_curvature_bound(cfg);
            for (const auto& sig : generate_scene(cfg).signatures) {
                for (std::size_t m = 1; m + 1 < sig.size(); ++m) {
                    EXPECT_LE(std::abs(sig[m + 1] - 2 * sig[m] + sig[m - 1]), bound);
                }
            }
        }
    }
}

TEST(Synth, NoiseIsIsotropicAcrossBands) {
    SceneConfig cfg;
    cfg.height = cfg.width = 160;
    cfg.classes = 2;
    cfg.noise_std = 0.05;
    cfg.brightness_jitter = 0.0;
    const Scene s = generate_scene(cfg);
    const auto counts = s.labels.class_counts(2);
    std::size_t checked = 0;
    for (std::size_t c = 0; c < 2; ++c) {
        if (counts[c] < 10000) continue;
        ++checked;
        for (std::size_t m = 0; m < cfg.bands; ++m) {
            double sum = 0.0, sq = 0.0;
            for (std::size_t n = 0; n < s.labels.values().size(); ++n) {
                if (s.labels.values()[n] != c) continue;
                const double v = s.cube.band(m)[n];
                sum += v;
                sq += v * v;
            }
            const double k = static_cast<double>(counts[c]);
            const double sd = std::sqrt((sq - sum * sum / k) / (k - 1));
            EXPECT_NEAR(sd, cfg.noise_std, 0.15 * cfg.noise_std) << "class " << c << " band " << m;
        }
    }
    EXPECT_GT(checked, 0u);
}

TEST(Synth, BlurSmoothsNoise) {
    SceneConfig cfg;
    cfg.height = cfg.width = 64;
    const Scene sharp = generate_scene(cfg);
    cfg.spatial_blur = 2;
    const Scene blurred = generate_scene(cfg);
    auto roughness = [](const HyperCube& c) {
        double sum = 0.0;
        for (std::size_t r = 0; r < c.height(); ++r)
            for (std::size_t k = 0; k + 1 < c.width(); ++k) sum += std::abs(c(r, k + 1, 5) - c(r, k, 5));
        return sum;
    };
    EXPECT_LT(roughness(blurred.cube), 0.5 * roughness(sharp.cube));
}

TEST(Synth, RejectsBadConfigs) {
    SceneConfig cfg;
    cfg.classes = 1;
    EXPECT_THROW(generate_scene(cfg), InvalidArgument);
    cfg = SceneConfig{};
    cfg.noise_std = -1.0;
    EXPECT_THROW(generate_scene(cfg), InvalidArgument);
    cfg = SceneConfig{};
    cfg.majority_class = 4;
    EXPECT_THROW(generate_scene(cfg), InvalidArgument);
}
