#include "rrfnn/stats.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <cmath>

#include "rrfnn/errors.hpp"

namespace rrfnn {

double student_t_critical(std::size_t dof, double confidence) {
    if (dof == 0) throw InvalidArgument("Student-t critical value needs at least one degree of freedom");
    if (!(confidence > 0.0 && confidence < 1.0)) throw InvalidArgument("confidence must lie in (0, 1)");
    const boost::math::students_t dist(static_cast<double>(dof));
    return boost::math::quantile(dist, 0.5 + confidence / 2.0);
}

Summary aggregate(std::span<const double> values, double confidence) {
    if (values.size() < 2) throw InvalidArgument("aggregate needs at least 2 values");
    Summary s;
    s.n = values.size();
    const double n = static_cast<double>(s.n);
    double sum = 0.0;
    for (double v : values) sum += v;
    s.mean = sum / n;
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(ss / (n - 1.0));
    const double half = student_t_critical(s.n - 1, confidence) * s.std / std::sqrt(n);
    s.ci_low = s.mean - half;
    s.ci_high = s.mean + half;
    return s;
}

}  // namespace rrfnn
