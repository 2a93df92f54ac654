#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "rrfnn/errors.hpp"
#include "rrfnn/tensor.hpp"
#include "test_util.hpp"

using namespace rrfnn;
using namespace rrfnn::testing;

TEST(Dims3, OffsetIsSpectralSlowest) {
    const Dims3 d{3, 4, 5};
    EXPECT_EQ(d.size(), 60u);
    EXPECT_EQ(d.offset(0, 0, 1), 1u);
    EXPECT_EQ(d.offset(0, 1, 0), 5u);
    EXPECT_EQ(d.offset(1, 0, 0), 20u);
    EXPECT_EQ(d.offset(2, 3, 4), 59u);
}

TEST(Tensor3, RejectsBadShapes) {
    EXPECT_THROW(Tensor3(Dims3{0, 2, 2}), InvalidArgument);
    EXPECT_THROW(Tensor3(Dims3{1, 2, 2}, std::vector<double>(3)), ShapeError);
    EXPECT_THROW(Tensor3(Dims3{1, 1, 1}, {std::numeric_limits<double>::quiet_NaN()}), InvalidArgument);
}

TEST(Outer3, MatchesHandValues) {
    const std::vector<double> a{1, 2}, b{3, 4, 5}, c{-1, 0.5};
    const Tensor3 t = outer3(a, b, c);
    ASSERT_EQ(t.dims(), (Dims3{2, 3, 2}));
    for (std::size_t m = 0; m < 2; ++m)
        for (std::size_t j = 0; j < 3; ++j)
            for (std::size_t i = 0; i < 2; ++i) EXPECT_EQ(t(m, j, i), a[m] * b[j] * c[i]);
    EXPECT_EQ(t(1, 2, 0), -10.0);
}

TEST(Outer3, RejectsEmptyAndNonFinite) {
    const std::vector<double> ok{1.0}, empty;
    const std::vector<double> inf{std::numeric_limits<double>::infinity()};
    EXPECT_THROW(outer3(empty, ok, ok), InvalidArgument);
    EXPECT_THROW(outer3(ok, inf, ok), InvalidArgument);
}

TEST(CpReconstruct, SumsRankOneTerms) {
    Rng rng(1);
    const CPFactorSet f = random_factors(3, 4, 5, rng);
    const Tensor3 t = cp_reconstruct(f);
    for (std::size_t m = 0; m < 4; ++m)
        for (std::size_t j = 0; j < 5; ++j)
            for (std::size_t i = 0; i < 5; ++i) {
                double want = 0.0;
                for (std::size_t k = 0; k < 3; ++k) {
                    want += f.view().spectral_k(k)[m] * f.view().spatial_a_k(k)[j] * f.view().spatial_b_k(k)[i];
                }
                EXPECT_NEAR(t(m, j, i), want, 1e-14);
            }
}

TEST(Inner, MatchesFlatDotProductAndChecksShape) {
    Rng rng(2);
    const Tensor3 x = random_tensor({2, 3, 3}, rng);
    const Tensor3 y = random_tensor({2, 3, 3}, rng);
    double want = 0.0;
    for (std::size_t n = 0; n < x.values().size(); ++n) want += x.values()[n] * y.values()[n];
    EXPECT_NEAR(inner(x, y), want, 1e-14);

    const Tensor3 z = random_tensor({3, 3, 2}, rng);
    try {
        inner(x, z);
        FAIL() << "expected ShapeError";
    } catch (const ShapeError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find(to_string(x.dims())), std::string::npos) << msg;
        EXPECT_NE(msg.find(to_string(z.dims())), std::string::npos) << msg;
    }
}

TEST(Contract, SpectralAndSpatialMatchLoops) {
    Rng rng(3);
    const Tensor3 x = random_tensor({4, 3, 5}, rng);
    const auto v = random_vector(4, rng);
    const auto row = random_vector(3, rng);
    const auto col = random_vector(5, rng);

    const Matrix m = contract_spectral(x, v);
    ASSERT_EQ(m.rows, 3u);
    ASSERT_EQ(m.cols, 5u);
    for (std::size_t j = 0; j < 3; ++j)
        for (std::size_t i = 0; i < 5; ++i) {
            double want = 0.0;
            for (std::size_t b = 0; b < 4; ++b) want += v[b] * x(b, j, i);
            EXPECT_NEAR(m(j, i), want, 1e-14);
        }

    const auto s = contract_spatial(x, row, col);
    ASSERT_EQ(s.size(), 4u);
    for (std::size_t b = 0; b < 4; ++b) {
        double want = 0.0;
        for (std::size_t j = 0; j < 3; ++j)
            for (std::size_t i = 0; i < 5; ++i) want += x(b, j, i) * row[j] * col[i];
        EXPECT_NEAR(s[b], want, 1e-14);
    }
}

TEST(CpInner, RankOneIsProductOfContractions) {
    Rng rng(4);
    const CPFactorSet f = random_factors(1, 6, 3, rng);
    const Tensor3 x = random_tensor({6, 3, 3}, rng);
    const auto s = contract_spatial(x, f.view().spatial_a_k(0), f.view().spatial_b_k(0));
    double want = 0.0;
    for (std::size_t m = 0; m < 6; ++m) want += f.view().spectral_k(0)[m] * s[m];
    EXPECT_NEAR(cp_inner(f, x), want, 1e-13);
}

TEST(CpInner, EqualsDenseContractionOnRandomPairs) {
    Rng rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t R = 1 + rng.below(4), b = 1 + rng.below(8), s = 1 + rng.below(6);
        const CPFactorSet f = random_factors(R, b, s, rng);
        const Tensor3 x = random_tensor({b, s, s}, rng);
        const double dense = inner(cp_reconstruct(f), x);
        const double fact = cp_inner(f, x);
        EXPECT_LE(std::abs(fact - dense), 1e-10 * std::max(1.0, std::abs(dense))) << "R=" << R << " b=" << b;
    }
}

TEST(CpInner, LinearInInput) {
    Rng rng(6);
    const CPFactorSet f = random_factors(3, 5, 4, rng);
    const Tensor3 x = random_tensor({5, 4, 4}, rng);
    const Tensor3 y = random_tensor({5, 4, 4}, rng);
    std::vector<double> sum(x.values().size());
    for (std::size_t n = 0; n < sum.size(); ++n) sum[n] = 2.0 * x.values()[n] - 0.5 * y.values()[n];
    const Tensor3 z({5, 4, 4}, sum);
    EXPECT_NEAR(cp_inner(f, z), 2.0 * cp_inner(f, x) - 0.5 * cp_inner(f, y), 1e-12);
}

TEST(CpInner, RejectsMismatchedDims) {
    Rng rng(7);
    const CPFactorSet f = random_factors(2, 5, 3, rng);
    const Tensor3 x = random_tensor({5, 4, 4}, rng);
    EXPECT_THROW(cp_inner(f, x), ShapeError);
}

TEST(CPFactorSet, RejectsInconsistentTerms) {
    EXPECT_THROW(CPFactorSet({{1, 2}}, {{1}, {2}}, {{1}}), ShapeError);
    EXPECT_THROW(CPFactorSet({{1, 2}, {1}}, {{1}, {2}}, {{1}, {1}}), ShapeError);
}
