#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "rrfnn/errors.hpp"
#include "rrfnn/sampling.hpp"
#include "test_util.hpp"

using namespace rrfnn;
using namespace rrfnn::testing;

namespace {

std::shared_ptr<const LabeledImage> striped_image(std::size_t h, std::size_t w, std::size_t classes, Rng& rng) {
    LabelMap l(h, w);
    for (std::size_t r = 0; r < h; ++r)
        for (std::size_t c = 0; c < w; ++c) l(r, c) = static_cast<std::uint8_t>((r + 2 * c) % classes);
    l(3, 3) = kUnlabeled;
    return std::make_shared<LabeledImage>(LabeledImage{random_cube(h, w, 2, rng), l});
}

}  // namespace

TEST(SamplePool, SkipsMarginAndUnlabeledInRowMajorOrder) {
    Rng rng(1);
    const auto img = striped_image(8, 10, 3, rng);
    const SamplePool pool = build_sample_pool({img}, 3, 3);
    EXPECT_EQ(pool.size(), 6u * 8u - 1u);
    EXPECT_EQ(pool.dims(), (Dims3{2, 3, 3}));
    for (std::size_t i = 1; i < pool.size(); ++i) {
        const auto& a = pool.sample(i - 1);
        const auto& b = pool.sample(i);
        EXPECT_LT(a.row * 10 + a.col, b.row * 10 + b.col);
    }
    for (const auto& s : pool.samples()) {
        EXPECT_TRUE(has_patch(8, 10, s.row, s.col, 3));
        EXPECT_EQ(s.label, img->labels(s.row, s.col));
        EXPECT_FALSE(s.row == 3 && s.col == 3);
    }
}

TEST(SamplePool, FillMatchesExtractPatch) {
    Rng rng(2);
    const auto img = striped_image(7, 7, 2, rng);
    const SamplePool pool = build_sample_pool({img}, 5, 2);
    std::vector<double> buf(pool.dims().size());
    for (std::size_t i = 0; i < pool.size(); ++i) {
        pool.fill(i, buf);
        const Tensor3 want = extract_patch(img->cube, pool.sample(i).row, pool.sample(i).col, 5);
        ASSERT_TRUE(std::equal(buf.begin(), buf.end(), want.values().begin()));
        const PatchTensor p = pool.patch(i);
        EXPECT_EQ(p.class_id(), pool.label(i));
        EXPECT_EQ(p.origin.row, pool.sample(i).row);
    }
}

TEST(SamplePool, MultipleImagesAndErrors) {
    Rng rng(3);
    const auto a = striped_image(6, 6, 2, rng);
    const auto b = striped_image(5, 5, 2, rng);
    const SamplePool pool = build_sample_pool({a, b}, 3, 2);
    EXPECT_EQ(pool.size(), 16u - 1u + 9u - 1u);
    EXPECT_EQ(pool.sample(pool.size() - 1).image, 1u);
    EXPECT_THROW(build_sample_pool({a}, 4, 2), InvalidArgument);
    EXPECT_THROW(build_sample_pool({a}, 3, 1), InvalidArgument);  // label 1 >= classes
    auto bad = std::make_shared<LabeledImage>(LabeledImage{HyperCube(4, 4, 2), LabelMap(4, 5)});
    EXPECT_THROW(build_sample_pool({bad}, 3, 2), ShapeError);
}

TEST(Split, PartitionIsExactWithTsPerClass) {
    Rng rng(4);
    const auto img = striped_image(20, 20, 3, rng);
    const SamplePool pool = build_sample_pool({img}, 3, 3);
    for (std::uint64_t repeat = 0; repeat < 5; ++repeat) {
        const Split split = split_train_test(pool, {10, 99, repeat}, 3);
        EXPECT_EQ(split.train.size(), 30u);
        EXPECT_EQ(split.train.size() + split.test.size(), pool.size());
        std::vector<std::size_t> counts(3, 0);
        for (std::size_t i : split.train) ++counts[pool.label(i)];
        EXPECT_EQ(counts, (std::vector<std::size_t>{10, 10, 10}));
        std::vector<std::size_t> all(split.train);
        all.insert(all.end(), split.test.begin(), split.test.end());
        std::sort(all.begin(), all.end());
        for (std::size_t i = 0; i < all.size(); ++i) ASSERT_EQ(all[i], i);
        EXPECT_TRUE(std::is_sorted(split.test.begin(), split.test.end()));
    }
}

TEST(Split, DeterministicPerSeedAndRepeat) {
    Rng rng(5);
    const auto img = striped_image(20, 20, 3, rng);
    const SamplePool pool = build_sample_pool({img}, 3, 3);
    const Split a = split_train_test(pool, {10, 1, 0}, 3);
    const Split b = split_train_test(pool, {10, 1, 0}, 3);
    const Split c = split_train_test(pool, {10, 1, 1}, 3);
    const Split d = split_train_test(pool, {10, 2, 0}, 3);
    EXPECT_EQ(a.train, b.train);
    EXPECT_EQ(a.test, b.test);
    EXPECT_NE(a.train, c.train);
    EXPECT_NE(a.train, d.train);
    // Shuffled, not grouped by class.
    std::vector<std::size_t> labels;
    for (std::size_t i : a.train) labels.push_back(pool.label(i));
    EXPECT_FALSE(std::is_sorted(labels.begin(), labels.end()));
}

TEST(Split, ExactlyTsLeavesEmptyTestSet) {
    const std::uint8_t u = kUnlabeled;
    const auto img = std::make_shared<LabeledImage>(
        LabeledImage{HyperCube(3, 4, 1), LabelMap(3, 4, {u, u, u, u, u, 0, 1, u, u, u, u, u})});
    const SamplePool pool = build_sample_pool({img}, 1, 2);
    const Split s = split_train_test(pool, {1, 0, 0}, 2);
    EXPECT_EQ(s.train.size(), 2u);
    EXPECT_TRUE(s.test.empty());
}

TEST(Split, InsufficientSamplesNamesTheClass) {
    Rng rng(6);
    const auto img = striped_image(6, 6, 2, rng);
    const SamplePool pool = build_sample_pool({img}, 3, 2);
    try {
        split_train_test(pool, {9, 0, 0}, 2);
        FAIL();
    } catch (const InsufficientSamples& e) {
        EXPECT_NE(std::string(e.what()).find("class"), std::string::npos) << e.what();
    }
}

TEST(PatchList, RejectsMixedDims) {
    std::vector<PatchTensor> v;
    v.push_back({Tensor3({1, 3, 3}), one_hot(0, 2), {}});
    v.push_back({Tensor3({1, 5, 5}), one_hot(1, 2), {}});
    EXPECT_THROW(PatchList(std::move(v)), ShapeError);
}
