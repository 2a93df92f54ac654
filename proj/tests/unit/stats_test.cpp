#include <gtest/gtest.h>

#include <cmath>

#include "rrfnn/errors.hpp"
#include "rrfnn/stats.hpp"

using namespace rrfnn;

TEST(StudentT, TableValues) {
    EXPECT_NEAR(student_t_critical(9), 2.262157, 1e-6);
    EXPECT_NEAR(student_t_critical(1), 12.706205, 1e-6);
    EXPECT_NEAR(student_t_critical(30), 2.042272, 1e-6);
    EXPECT_NEAR(student_t_critical(9, 0.99), 3.249836, 1e-6);
    EXPECT_THROW(student_t_critical(0), InvalidArgument);
}

TEST(Aggregate, OneToTen) {
    std::vector<double> v;
    for (int i = 1; i <= 10; ++i) v.push_back(i);
    const Summary s = aggregate(v);
    EXPECT_EQ(s.n, 10u);
    EXPECT_DOUBLE_EQ(s.mean, 5.5);
    EXPECT_NEAR(s.std, std::sqrt(82.5 / 9.0), 1e-12);
    const double half = 2.2621571628541 * std::sqrt(82.5 / 9.0) / std::sqrt(10.0);
    EXPECT_NEAR(s.ci_low, 5.5 - half, 1e-9);
    EXPECT_NEAR(s.ci_high, 5.5 + half, 1e-9);
    EXPECT_NEAR(s.ci_low, 3.334, 1e-3);
    EXPECT_NEAR(s.ci_high, 7.666, 1e-3);
}

TEST(Aggregate, ZeroVarianceGivesZeroWidth) {
    const std::vector<double> v(10, 0.8);
    const Summary s = aggregate(v);
    EXPECT_DOUBLE_EQ(s.mean, 0.8);
    EXPECT_NEAR(s.std, 0.0, 1e-15);
    EXPECT_NEAR(s.ci_high - s.ci_low, 0.0, 1e-14);
}

TEST(Aggregate, IntervalContainsMean) {
    std::vector<double> v{0.3, 0.9, 0.1, 0.55, 0.52};
    for (int n = 0; n < 20; ++n) {
        v.push_back(std::fmod(v.back() * 7.31 + 0.17, 1.0));
        const Summary s = aggregate(v);
        EXPECT_LE(s.ci_low, s.mean);
        EXPECT_LE(s.mean, s.ci_high);
    }
}

TEST(Aggregate, NeedsTwoValues) {
    EXPECT_THROW(aggregate(std::vector<double>{1.0}), InvalidArgument);
    EXPECT_THROW(aggregate(std::vector<double>{}), InvalidArgument);
}
