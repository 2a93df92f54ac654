#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <vector>

#include "rrfnn/random.hpp"

using namespace rrfnn;

TEST(Rng, EngineIsStandardMt19937_64) {
    // 10000th output of the default-seeded engine, fixed by the C++ standard.
    Rng rng(5489u);
    std::uint64_t v = 0;
    for (int i = 0; i < 10000; ++i) v = rng.next_u64();
    EXPECT_EQ(v, 9981545732273789042ULL);
}

TEST(Rng, UniformUsesTop53Bits) {
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) {
        const double u = a.uniform();
        EXPECT_EQ(u, static_cast<double>(b.next_u64() >> 11) * 0x1.0p-53);
        EXPECT_GE(u, 0.0);
        EXPECT_LT(u, 1.0);
    }
}

TEST(Rng, BelowStaysInRangeAndCoversIt) {
    Rng rng(7);
    std::vector<int> hits(7, 0);
    for (int i = 0; i < 70000; ++i) {
        const auto v = rng.below(7);
        ASSERT_LT(v, 7u);
        ++hits[v];
    }
    for (int h : hits) EXPECT_NEAR(h, 10000, 500);
    EXPECT_EQ(rng.below(1), 0u);
}

TEST(Rng, NormalHasUnitMoments) {
    Rng rng(11);
    const int n = 200000;
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double z = rng.normal();
        sum += z;
        sq += z * z;
    }
    const double mean = sum / n;
    EXPECT_NEAR(mean, 0.0, 0.01);
    EXPECT_NEAR(sq / n - mean * mean, 1.0, 0.02);
}

TEST(Shuffle, IsADeterministicPermutation) {
    std::vector<int> a(50), b(50);
    std::iota(a.begin(), a.end(), 0);
    std::iota(b.begin(), b.end(), 0);
    Rng r1(3), r2(3);
    shuffle(std::span(a), r1);
    shuffle(std::span(b), r2);
    EXPECT_EQ(a, b);
    std::vector<int> sorted = a;
    std::sort(sorted.begin(), sorted.end());
    for (int i = 0; i < 50; ++i) EXPECT_EQ(sorted[i], i);
    EXPECT_FALSE(std::is_sorted(a.begin(), a.end()));
}

TEST(DeriveSeed, FoldsWithSplitMix) {
    const std::uint64_t h0 = 0x9E3779B97F4A7C15ULL;
    EXPECT_EQ(derive_seed({}), h0);
    EXPECT_EQ(derive_seed({5}), splitmix64(h0 ^ 5));
    EXPECT_EQ(derive_seed({5, 9}), splitmix64(splitmix64(h0 ^ 5) ^ 9));
    EXPECT_NE(derive_seed({1, 2}), derive_seed({2, 1}));
    static_assert(derive_seed({1, 2, 3}) == derive_seed({1, 2, 3}));
}

TEST(SplitMix64, KnownVector) {
    // First output of the reference splitmix64 generator seeded with 0.
    EXPECT_EQ(splitmix64(0), 0xE220A8397B1DCDAFULL);
}
