#include "rrfnn/evaluate.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <string>

#include "rrfnn/errors.hpp"

namespace rrfnn {

namespace {

using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ColMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor>;

constexpr std::size_t kDenseBatch = 128;

template <class Model>
Evaluation evaluate_each(const Model& model, const PatchSource& test) {
    if (test.size() == 0) throw InvalidArgument("test set is empty");
    if (test.dims() != model.shape().input_dims()) {
        throw ShapeError("test patches have dims " + to_string(test.dims()) + ", model expects " +
                         to_string(model.shape().input_dims()));
    }
    std::vector<double> buffer(test.dims().size());
    std::vector<std::size_t> truth(test.size());
    std::vector<std::size_t> predicted(test.size());
    for (std::size_t i = 0; i < test.size(); ++i) {
        test.fill(i, buffer);
        truth[i] = test.label(i);
        predicted[i] = predict(model, Tensor3View(test.dims(), buffer));
    }
    return tally(truth, predicted, model.shape().classes);
}

template <class Model>
Evaluation evaluate_from_maps(const Model& model, const PoolSubset& test) {
    if (test.size() == 0) throw InvalidArgument("test set is empty");
    const SamplePool& pool = test.pool();
    if (pool.dims() != model.shape().input_dims()) {
        throw ShapeError("test patches have dims " + to_string(pool.dims()) + ", model expects " +
                         to_string(model.shape().input_dims()));
    }
    std::vector<bool> needed(pool.images().size(), false);
    for (std::size_t i : test.indices()) needed[pool.sample(i).image] = true;

    std::vector<std::vector<std::uint8_t>> maps(pool.images().size());
    for (std::size_t n = 0; n < maps.size(); ++n) {
        if (needed[n]) maps[n] = predict_image(model, pool.images()[n]->cube);
    }

    std::vector<std::size_t> truth(test.size());
    std::vector<std::size_t> predicted(test.size());
    for (std::size_t t = 0; t < test.size(); ++t) {
        const SampleRef& s = pool.sample(test.indices()[t]);
        const std::size_t width = pool.images()[s.image]->cube.width();
        truth[t] = s.label;
        predicted[t] = maps[s.image][s.row * width + s.col];
    }
    return tally(truth, predicted, model.shape().classes);
}

void require_cube(const NetworkShape& shape, const HyperCube& cube) {
    if (cube.bands() != shape.bands) {
        throw ShapeError("cube has " + std::to_string(cube.bands()) + " bands, model expects " +
                         std::to_string(shape.bands));
    }
}

}  // namespace

Evaluation tally(std::span<const std::size_t> truth, std::span<const std::size_t> predicted, std::size_t classes) {
    if (truth.size() != predicted.size()) throw ShapeError("truth and prediction counts differ");
    Evaluation e;
    e.confusion.assign(classes, std::vector<std::size_t>(classes, 0));
    e.class_totals.assign(classes, 0);
    e.per_class_accuracy.assign(classes, 0.0);
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i] >= classes || predicted[i] >= classes) throw InvalidArgument("class id out of range");
        ++e.confusion[truth[i]][predicted[i]];
        ++e.class_totals[truth[i]];
    }
    std::size_t correct = 0;
    for (std::size_t c = 0; c < classes; ++c) {
        correct += e.confusion[c][c];
        if (e.class_totals[c] > 0) {
            e.per_class_accuracy[c] =
                static_cast<double>(e.confusion[c][c]) / static_cast<double>(e.class_totals[c]);
        }
    }
    e.total = truth.size();
    e.overall_accuracy = e.total > 0 ? static_cast<double>(correct) / static_cast<double>(e.total) : 0.0;
    return e;
}

Evaluation evaluate(const RankRFNN& model, const PatchSource& test) { return evaluate_each(model, test); }
Evaluation evaluate(const DenseFNN& model, const PatchSource& test) { return evaluate_each(model, test); }
Evaluation evaluate(const RankRFNN& model, const PoolSubset& test) { return evaluate_from_maps(model, test); }
Evaluation evaluate(const DenseFNN& model, const PoolSubset& test) { return evaluate_from_maps(model, test); }

std::vector<std::uint8_t> predict_image(const RankRFNN& model, const HyperCube& cube) {
    const NetworkShape& shape = model.shape();
    require_cube(shape, cube);
    const std::size_t H = cube.height();
    const std::size_t W = cube.width();
    const std::size_t s = shape.side;
    const std::size_t h = s / 2;
    std::vector<std::uint8_t> out(H * W, kUnlabeled);
    if (s % 2 == 0 || H < s || W < s) return out;

    const std::size_t plane = H * W;
    std::vector<double> z(shape.hidden * plane, 0.0);
    std::vector<double> projected(plane);
    std::vector<double> filtered(plane);

    for (std::size_t q = 0; q < shape.hidden; ++q) {
        const CPFactorView f = model.factors(q);
        double* zq = z.data() + q * plane;
        for (std::size_t k = 0; k < f.rank; ++k) {
            const auto w3 = f.spectral_k(k);
            const auto w2 = f.spatial_a_k(k);
            const auto w1 = f.spatial_b_k(k);

            std::fill(projected.begin(), projected.end(), 0.0);
            for (std::size_t m = 0; m < cube.bands(); ++m) {
                const double w = w3[m];
                const double* src = cube.band(m).data();
                for (std::size_t n = 0; n < plane; ++n) projected[n] += w * src[n];
            }
            // Column filter: filtered(r, c) = sum_i w1[i] projected(r, c - h + i).
            for (std::size_t r = 0; r < H; ++r) {
                for (std::size_t c = h; c + h < W; ++c) {
                    const double* row = projected.data() + r * W + (c - h);
                    double partial = 0.0;
                    for (std::size_t i = 0; i < s; ++i) partial += w1[i] * row[i];
                    filtered[r * W + c] = partial;
                }
            }
            // Row filter on the interior.
            for (std::size_t r = h; r + h < H; ++r) {
                for (std::size_t c = h; c + h < W; ++c) {
                    double term = 0.0;
                    for (std::size_t j = 0; j < s; ++j) term += w2[j] * filtered[(r - h + j) * W + c];
                    zq[r * W + c] += term;
                }
            }
        }
    }

    ForwardTrace trace;
    trace.preactivations.resize(shape.hidden);
    for (std::size_t r = h; r + h < H; ++r) {
        for (std::size_t c = h; c + h < W; ++c) {
            for (std::size_t q = 0; q < shape.hidden; ++q) trace.preactivations[q] = z[q * plane + r * W + c];
            complete_forward(model, trace);
            out[r * W + c] = static_cast<std::uint8_t>(argmax(trace.probabilities));
        }
    }
    return out;
}

std::vector<std::uint8_t> predict_image(const DenseFNN& model, const HyperCube& cube) {
    const NetworkShape& shape = model.shape();
    require_cube(shape, cube);
    const std::size_t H = cube.height();
    const std::size_t W = cube.width();
    const std::size_t s = shape.side;
    const std::size_t h = s / 2;
    std::vector<std::uint8_t> out(H * W, kUnlabeled);
    if (s % 2 == 0 || H < s || W < s) return out;

    std::vector<std::size_t> pixels;
    for (std::size_t r = h; r + h < H; ++r) {
        for (std::size_t c = h; c + h < W; ++c) pixels.push_back(r * W + c);
    }

    const auto n = static_cast<Eigen::Index>(shape.input_dims().size());
    const auto Q = static_cast<Eigen::Index>(shape.hidden);
    Eigen::Map<const RowMajorMatrix> weights(model.parameters().data(), Q, n);
    std::vector<double> batch(kDenseBatch * static_cast<std::size_t>(n));
    ColMajorMatrix z(Q, static_cast<Eigen::Index>(kDenseBatch));
    ForwardTrace trace;
    trace.preactivations.resize(shape.hidden);

    for (std::size_t start = 0; start < pixels.size(); start += kDenseBatch) {
        const std::size_t B = std::min(kDenseBatch, pixels.size() - start);
        for (std::size_t b = 0; b < B; ++b) {
            const std::size_t p = pixels[start + b];
            extract_patch_into(cube, p / W, p % W, s,
                               std::span(batch).subspan(b * static_cast<std::size_t>(n), static_cast<std::size_t>(n)));
        }
        Eigen::Map<const ColMajorMatrix> x(batch.data(), n, static_cast<Eigen::Index>(B));
        z.leftCols(static_cast<Eigen::Index>(B)).noalias() = weights * x;
        for (std::size_t b = 0; b < B; ++b) {
            for (Eigen::Index q = 0; q < Q; ++q) {
                trace.preactivations[static_cast<std::size_t>(q)] = z(q, static_cast<Eigen::Index>(b));
            }
            complete_forward(model, trace);
            out[pixels[start + b]] = static_cast<std::uint8_t>(argmax(trace.probabilities));
        }
    }
    return out;
}

}  // namespace rrfnn
