#pragma once

// Central finite-difference verification of backward().
//
// For every parameter theta_i the numeric derivative is
//     (L(theta + h e_i) - L(theta - h e_i)) / 2h
// and the relative error against the analytic value g is
//     |g - fd| / max(|g|, |fd|, floor)
// where the floor keeps near-zero gradients from dividing by round-off.

#include <cstddef>
#include <cstdint>
#include <span>

#include "rrfnn/model.hpp"

namespace rrfnn {

struct GradCheckReport {
    std::size_t parameters = 0;
    double max_relative_error = 0.0;
    double max_absolute_error = 0.0;
};

double relative_error(double analytic, double numeric, double floor = 1e-6);

GradCheckReport check_gradients(const RankRFNN& model, const Tensor3View& x, std::span<const double> target,
                                double h = 1e-5);
GradCheckReport check_gradients(const DenseFNN& model, const Tensor3View& x, std::span<const double> target,
                                double h = 1e-5);

struct GradCheckSuite {
    std::size_t instances = 20;
    NetworkShape shape{2, 2, 3, 3, 4};
    double parameter_range = 0.5;  ///< parameters ~ U(-range, range)
    double h = 1e-5;
    std::uint64_t seed = 0;
};

struct GradCheckSuiteReport {
    GradCheckReport rank_r;
    GradCheckReport dense;
    double max_relative_error() const;
};

/// Random models and inputs x ~ U(0, 1) with a random target class. Odd
/// instances enable biases.
GradCheckSuiteReport run_gradcheck_suite(const GradCheckSuite& suite);

}  // namespace rrfnn
