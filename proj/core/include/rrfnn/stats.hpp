#pragma once

#include <cstddef>
#include <span>

namespace rrfnn {

struct Summary {
    std::size_t n = 0;
    double mean = 0.0;
    double std = 0.0;  ///< sample standard deviation (n - 1 denominator)
    double ci_low = 0.0;
    double ci_high = 0.0;
};

/// Two-sided Student-t critical value t_{(1 + confidence) / 2, dof}.
double student_t_critical(std::size_t dof, double confidence = 0.95);

/// Mean, sample std and the Student-t confidence interval
/// mean +- t_{0.975, n-1} std / sqrt(n). Throws InvalidArgument for n < 2.
Summary aggregate(std::span<const double> values, double confidence = 0.95);

}  // namespace rrfnn
