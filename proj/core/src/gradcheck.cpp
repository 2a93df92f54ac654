#include "rrfnn/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "rrfnn/random.hpp"

namespace rrfnn {

namespace {

template <class Model>
GradCheckReport check(const Model& model, const Tensor3View& x, std::span<const double> target, double h) {
    const LossAndGradients analytic = backward(model, x, target);
    Model probe = model;
    auto params = probe.parameters();
    auto loss_at = [&] { return cross_entropy(forward(probe, x).probabilities, target); };

    GradCheckReport report;
    report.parameters = params.size();
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double saved = params[i];
        params[i] = saved + h;
        const double plus = loss_at();
        params[i] = saved - h;
        const double minus = loss_at();
        params[i] = saved;
        const double numeric = (plus - minus) / (2.0 * h);
        const double g = analytic.gradients.values[i];
        report.max_absolute_error = std::max(report.max_absolute_error, std::abs(g - numeric));
        report.max_relative_error = std::max(report.max_relative_error, relative_error(g, numeric));
    }
    return report;
}

void merge(GradCheckReport& into, const GradCheckReport& r) {
    into.parameters += r.parameters;
    into.max_relative_error = std::max(into.max_relative_error, r.max_relative_error);
    into.max_absolute_error = std::max(into.max_absolute_error, r.max_absolute_error);
}

}  // namespace

double relative_error(double analytic, double numeric, double floor) {
    return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), floor});
}

GradCheckReport check_gradients(const RankRFNN& model, const Tensor3View& x, std::span<const double> target,
                                double h) {
    return check(model, x, target, h);
}

GradCheckReport check_gradients(const DenseFNN& model, const Tensor3View& x, std::span<const double> target,
                                double h) {
    return check(model, x, target, h);
}

double GradCheckSuiteReport::max_relative_error() const {
    return std::max(rank_r.max_relative_error, dense.max_relative_error);
}

GradCheckSuiteReport run_gradcheck_suite(const GradCheckSuite& suite) {
    GradCheckSuiteReport report;
    for (std::size_t n = 0; n < suite.instances; ++n) {
        Rng rng(derive_seed({suite.seed, n}));
        NetworkShape shape = suite.shape;
        shape.use_bias = n % 2 == 1;

        RankRFNN rank_r(shape);
        for (double& p : rank_r.parameters()) p = rng.uniform(-suite.parameter_range, suite.parameter_range);
        DenseFNN dense(shape);
        for (double& p : dense.parameters()) p = rng.uniform(-suite.parameter_range, suite.parameter_range);

        Tensor3 x(shape.input_dims());
        for (double& v : x.values()) v = rng.uniform();
        const auto target = one_hot(static_cast<std::size_t>(rng.below(shape.classes)), shape.classes);

        merge(report.rank_r, check(rank_r, x, target, suite.h));
        merge(report.dense, check(dense, x, target, suite.h));
    }
    return report;
}

}  // namespace rrfnn
