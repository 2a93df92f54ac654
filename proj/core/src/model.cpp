#include "rrfnn/model.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <string>

#include "rrfnn/errors.hpp"
#include "rrfnn/random.hpp"

namespace rrfnn {

namespace {

using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ColMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor>;

constexpr double kProbabilityFloor = 1e-12;

// Output-layer parameters of either network, viewed from its flat vector.
struct Head {
    std::span<const double> weights;  // C x Q
    std::span<const double> hidden_bias;
    std::span<const double> output_bias;
};

template <class Model>
Head head_of(const Model& model) {
    return {model.output_weights(), model.hidden_bias(), model.output_bias()};
}

void resize_trace(ForwardTrace& trace, const NetworkShape& shape) {
    trace.preactivations.resize(shape.hidden);
    trace.hidden.resize(shape.hidden);
    trace.logits.resize(shape.classes);
    trace.probabilities.resize(shape.classes);
}

void softmax(std::span<const double> logits, std::span<double> out) {
    const double top = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (std::size_t c = 0; c < logits.size(); ++c) {
        out[c] = std::exp(logits[c] - top);
        sum += out[c];
    }
    for (double& p : out) p /= sum;
}

// Expects the raw contractions in trace.preactivations; adds hidden biases and
// fills the rest of the trace.
void finish_forward(const NetworkShape& shape, const Head& head, ForwardTrace& trace) {
    const std::size_t Q = shape.hidden;
    for (std::size_t q = 0; q < Q; ++q) {
        if (shape.use_bias) trace.preactivations[q] += head.hidden_bias[q];
        trace.hidden[q] = activate(shape.activation, trace.preactivations[q]);
    }
    for (std::size_t c = 0; c < shape.classes; ++c) {
        const double* v = head.weights.data() + c * Q;
        double logit = 0.0;
        for (std::size_t q = 0; q < Q; ++q) logit += v[q] * trace.hidden[q];
        if (shape.use_bias) logit += head.output_bias[c];
        trace.logits[c] = logit;
    }
    softmax(trace.logits, trace.probabilities);
}

// Writes output-layer gradients (accumulating) and the hidden deltas
// g'(z_q) sum_c (p_c - t_c) V[c][q]. Returns the sample loss.
template <class Model>
double backprop_head(const Model& model, const ForwardTrace& trace, std::size_t target, std::span<double> grads,
                     std::span<double> deltas) {
    const NetworkShape& shape = model.shape();
    const std::size_t Q = shape.hidden;
    const auto V = model.output_weights();
    double* gV = grads.data() + model.output_weights_offset();

    std::fill(deltas.begin(), deltas.end(), 0.0);
    for (std::size_t c = 0; c < shape.classes; ++c) {
        const double err = trace.probabilities[c] - (c == target ? 1.0 : 0.0);
        for (std::size_t q = 0; q < Q; ++q) {
            gV[c * Q + q] += err * trace.hidden[q];
            deltas[q] += err * V[c * Q + q];
        }
        if (shape.use_bias) grads[model.output_bias_offset() + c] += err;
    }
    for (std::size_t q = 0; q < Q; ++q) {
        deltas[q] *= activation_derivative(shape.activation, trace.preactivations[q]);
        if (shape.use_bias) grads[model.hidden_bias_offset() + q] += deltas[q];
    }
    return -std::log(std::max(trace.probabilities[target], kProbabilityFloor));
}

std::size_t target_class(std::span<const double> target, std::size_t classes) {
    if (target.size() != classes) {
        throw ShapeError("target has " + std::to_string(target.size()) + " entries, model has " +
                         std::to_string(classes) + " classes");
    }
    std::size_t hot = classes;
    for (std::size_t c = 0; c < classes; ++c) {
        if (target[c] == 1.0 && hot == classes) {
            hot = c;
        } else if (target[c] != 0.0) {
            throw InvalidArgument("target is not a one-hot vector");
        }
    }
    if (hot == classes) throw InvalidArgument("target is not a one-hot vector");
    return hot;
}

void require_input(const NetworkShape& shape, const Tensor3View& x) {
    if (x.dims() != shape.input_dims()) {
        throw ShapeError("patch of dims " + to_string(x.dims()) + " does not match model input " +
                         to_string(shape.input_dims()));
    }
}

void require_batch(const NetworkShape& shape, std::span<const double> patches, std::span<const std::size_t> labels,
                   std::span<double> grads, std::size_t param_count) {
    if (patches.size() != labels.size() * shape.input_dims().size()) {
        throw ShapeError("batch buffer holds " + std::to_string(patches.size()) + " values, expected " +
                         std::to_string(labels.size() * shape.input_dims().size()));
    }
    if (grads.size() != param_count) {
        throw ShapeError("gradient buffer has " + std::to_string(grads.size()) + " entries, model has " +
                         std::to_string(param_count));
    }
    for (std::size_t label : labels) {
        if (label >= shape.classes) throw InvalidArgument("label " + std::to_string(label) + " out of range");
    }
}

void fill_uniform(std::span<double> values, double bound, Rng& rng) {
    for (double& v : values) v = rng.uniform(-bound, bound);
}

}  // namespace

std::string_view to_string(Activation activation) {
    switch (activation) {
        case Activation::sigmoid: return "sigmoid";
        case Activation::relu: return "relu";
        case Activation::tanh: return "tanh";
    }
    return "unknown";
}

Activation parse_activation(std::string_view name) {
    if (name == "sigmoid") return Activation::sigmoid;
    if (name == "relu") return Activation::relu;
    if (name == "tanh") return Activation::tanh;
    throw InvalidArgument("unknown activation '" + std::string(name) + "' (expected sigmoid, relu or tanh)");
}

double activate(Activation activation, double z) {
    switch (activation) {
        case Activation::sigmoid: return 1.0 / (1.0 + std::exp(-z));
        case Activation::relu: return z > 0.0 ? z : 0.0;
        case Activation::tanh: return std::tanh(z);
    }
    return z;
}

double activation_derivative(Activation activation, double z) {
    switch (activation) {
        case Activation::sigmoid: {
            const double g = 1.0 / (1.0 + std::exp(-z));
            return g * (1.0 - g);
        }
        case Activation::relu: return z > 0.0 ? 1.0 : 0.0;
        case Activation::tanh: {
            const double g = std::tanh(z);
            return 1.0 - g * g;
        }
    }
    return 1.0;
}

void NetworkShape::validate(bool uses_rank) const {
    if (hidden == 0) throw InvalidArgument("hidden neuron count must be at least 1");
    if (uses_rank && rank == 0) throw InvalidArgument("rank must be at least 1");
    if (classes < 2) throw InvalidArgument("class count must be at least 2");
    if (side == 0) throw InvalidArgument("patch side must be positive");
    if (bands == 0) throw InvalidArgument("band count must be positive");
    if (static_cast<std::uint32_t>(activation) > 2) throw InvalidArgument("unknown activation id");
}

std::size_t rank_r_param_count(const NetworkShape& s) {
    const std::size_t bias = s.use_bias ? s.hidden + s.classes : 0;
    return s.hidden * s.rank * (2 * s.side + s.bands) + s.classes * s.hidden + bias;
}

std::size_t dense_param_count(const NetworkShape& s) {
    const std::size_t bias = s.use_bias ? s.hidden + s.classes : 0;
    return s.hidden * s.side * s.side * s.bands + s.classes * s.hidden + bias;
}

// ---------------------------------------------------------------------------
// RankRFNN

RankRFNN::RankRFNN(const NetworkShape& shape) : shape_(shape) {
    shape_.validate(true);
    block_ = shape_.rank * (shape_.bands + 2 * shape_.side);
    head_offset_ = shape_.hidden * block_;
    params_.assign(rank_r_param_count(shape_), 0.0);
}

std::size_t RankRFNN::spectral_offset(std::size_t q, std::size_t k) const noexcept {
    return q * block_ + k * shape_.bands;
}

std::size_t RankRFNN::spatial_a_offset(std::size_t q, std::size_t k) const noexcept {
    return q * block_ + shape_.rank * shape_.bands + k * shape_.side;
}

std::size_t RankRFNN::spatial_b_offset(std::size_t q, std::size_t k) const noexcept {
    return q * block_ + shape_.rank * (shape_.bands + shape_.side) + k * shape_.side;
}

CPFactorView RankRFNN::factors(std::size_t q) const {
    const std::span<const double> all(params_);
    const std::size_t R = shape_.rank;
    return {R,
            shape_.bands,
            shape_.side,
            all.subspan(spectral_offset(q, 0), R * shape_.bands),
            all.subspan(spatial_a_offset(q, 0), R * shape_.side),
            all.subspan(spatial_b_offset(q, 0), R * shape_.side)};
}

std::span<double> RankRFNN::spectral(std::size_t q, std::size_t k) {
    return std::span(params_).subspan(spectral_offset(q, k), shape_.bands);
}

std::span<double> RankRFNN::spatial_a(std::size_t q, std::size_t k) {
    return std::span(params_).subspan(spatial_a_offset(q, k), shape_.side);
}

std::span<double> RankRFNN::spatial_b(std::size_t q, std::size_t k) {
    return std::span(params_).subspan(spatial_b_offset(q, k), shape_.side);
}

std::span<double> RankRFNN::output_weights() {
    return std::span(params_).subspan(head_offset_, shape_.classes * shape_.hidden);
}

std::span<const double> RankRFNN::output_weights() const {
    return std::span(params_).subspan(head_offset_, shape_.classes * shape_.hidden);
}

std::span<double> RankRFNN::hidden_bias() {
    if (!shape_.use_bias) return {};
    return std::span(params_).subspan(hidden_bias_offset(), shape_.hidden);
}

std::span<const double> RankRFNN::hidden_bias() const {
    if (!shape_.use_bias) return {};
    return std::span(params_).subspan(hidden_bias_offset(), shape_.hidden);
}

std::span<double> RankRFNN::output_bias() {
    if (!shape_.use_bias) return {};
    return std::span(params_).subspan(output_bias_offset(), shape_.classes);
}

std::span<const double> RankRFNN::output_bias() const {
    if (!shape_.use_bias) return {};
    return std::span(params_).subspan(output_bias_offset(), shape_.classes);
}

// ---------------------------------------------------------------------------
// DenseFNN

DenseFNN::DenseFNN(const NetworkShape& shape) : shape_(shape) {
    shape_.rank = 0;
    shape_.validate(false);
    head_offset_ = shape_.hidden * shape_.input_dims().size();
    params_.assign(dense_param_count(shape_), 0.0);
}

Tensor3View DenseFNN::weight(std::size_t q) const {
    const std::size_t n = shape_.input_dims().size();
    return Tensor3View(shape_.input_dims(), std::span(params_).subspan(weight_offset(q), n));
}

std::span<double> DenseFNN::weight_values(std::size_t q) {
    return std::span(params_).subspan(weight_offset(q), shape_.input_dims().size());
}

std::span<double> DenseFNN::output_weights() {
    return std::span(params_).subspan(head_offset_, shape_.classes * shape_.hidden);
}

std::span<const double> DenseFNN::output_weights() const {
    return std::span(params_).subspan(head_offset_, shape_.classes * shape_.hidden);
}

std::span<double> DenseFNN::hidden_bias() {
    if (!shape_.use_bias) return {};
    return std::span(params_).subspan(hidden_bias_offset(), shape_.hidden);
}

std::span<const double> DenseFNN::hidden_bias() const {
    if (!shape_.use_bias) return {};
    return std::span(params_).subspan(hidden_bias_offset(), shape_.hidden);
}

std::span<double> DenseFNN::output_bias() {
    if (!shape_.use_bias) return {};
    return std::span(params_).subspan(output_bias_offset(), shape_.classes);
}

std::span<const double> DenseFNN::output_bias() const {
    if (!shape_.use_bias) return {};
    return std::span(params_).subspan(output_bias_offset(), shape_.classes);
}

std::size_t param_count(const RankRFNN& model) { return model.parameter_count(); }
std::size_t param_count(const DenseFNN& model) { return model.parameter_count(); }

DenseFNN to_dense(const RankRFNN& model) {
    DenseFNN dense(model.shape());
    for (std::size_t q = 0; q < model.shape().hidden; ++q) {
        const Tensor3 w = cp_reconstruct(model.factors(q));
        std::copy(w.values().begin(), w.values().end(), dense.weight_values(q).begin());
    }
    const auto src = model.parameters().subspan(model.output_weights_offset());
    std::copy(src.begin(), src.end(), dense.parameters().begin() + dense.output_weights_offset());
    return dense;
}

void initialize(RankRFNN& model, std::uint64_t seed, double scale) {
    const NetworkShape& s = model.shape();
    Rng rng(derive_seed({seed, 0x52524E4EULL}));
    const double fan = static_cast<double>(s.rank * (2 * s.side + s.bands) + s.hidden);
    const double beta = scale * std::sqrt(6.0 / fan) / std::cbrt(static_cast<double>(s.rank));
    fill_uniform(model.parameters().subspan(0, model.output_weights_offset()), beta, rng);
    fill_uniform(model.output_weights(), scale * std::sqrt(3.0 / static_cast<double>(s.hidden)), rng);
    std::fill(model.hidden_bias().begin(), model.hidden_bias().end(), 0.0);
    std::fill(model.output_bias().begin(), model.output_bias().end(), 0.0);
}

void initialize(DenseFNN& model, std::uint64_t seed, double scale) {
    const NetworkShape& s = model.shape();
    Rng rng(derive_seed({seed, 0x444E4E00ULL}));
    const double fan = static_cast<double>(s.input_dims().size() + s.hidden);
    fill_uniform(model.parameters().subspan(0, model.output_weights_offset()), scale * std::sqrt(6.0 / fan), rng);
    fill_uniform(model.output_weights(), scale * std::sqrt(3.0 / static_cast<double>(s.hidden)), rng);
    std::fill(model.hidden_bias().begin(), model.hidden_bias().end(), 0.0);
    std::fill(model.output_bias().begin(), model.output_bias().end(), 0.0);
}

// ---------------------------------------------------------------------------
// Reference forward / backward

ForwardTrace forward(const RankRFNN& model, const Tensor3View& x) {
    require_input(model.shape(), x);
    ForwardTrace trace;
    resize_trace(trace, model.shape());
    for (std::size_t q = 0; q < model.shape().hidden; ++q) trace.preactivations[q] = cp_inner(model.factors(q), x);
    finish_forward(model.shape(), head_of(model), trace);
    return trace;
}

ForwardTrace forward(const DenseFNN& model, const Tensor3View& x) {
    require_input(model.shape(), x);
    ForwardTrace trace;
    resize_trace(trace, model.shape());
    for (std::size_t q = 0; q < model.shape().hidden; ++q) trace.preactivations[q] = inner(model.weight(q), x);
    finish_forward(model.shape(), head_of(model), trace);
    return trace;
}

void complete_forward(const RankRFNN& model, ForwardTrace& trace) {
    resize_trace(trace, model.shape());
    finish_forward(model.shape(), head_of(model), trace);
}

void complete_forward(const DenseFNN& model, ForwardTrace& trace) {
    resize_trace(trace, model.shape());
    finish_forward(model.shape(), head_of(model), trace);
}

double cross_entropy(std::span<const double> probabilities, std::span<const double> target) {
    const std::size_t c = target_class(target, probabilities.size());
    double sum = 0.0;
    for (double p : probabilities) {
        if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("probabilities must lie in [0, 1]");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw InvalidArgument("probabilities must sum to 1");
    return -std::log(std::max(probabilities[c], kProbabilityFloor));
}

LossAndGradients backward(const RankRFNN& model, const Tensor3View& x, std::span<const double> target) {
    const NetworkShape& shape = model.shape();
    const std::size_t cls = target_class(target, shape.classes);
    const ForwardTrace trace = forward(model, x);

    LossAndGradients out;
    out.loss = cross_entropy(trace.probabilities, target);
    out.gradients.values.assign(model.parameter_count(), 0.0);
    std::vector<double> deltas(shape.hidden);
    backprop_head(model, trace, cls, out.gradients.values, deltas);

    auto& g = out.gradients.values;
    for (std::size_t q = 0; q < shape.hidden; ++q) {
        const CPFactorView f = model.factors(q);
        const double delta = deltas[q];
        for (std::size_t k = 0; k < f.rank; ++k) {
            const auto w2 = f.spatial_a_k(k);
            const auto w1 = f.spatial_b_k(k);

            const std::vector<double> d3 = contract_spatial(x, w2, w1);
            double* g3 = g.data() + model.spectral_offset(q, k);
            for (std::size_t m = 0; m < f.bands; ++m) g3[m] = delta * d3[m];

            const Matrix reduced = contract_spectral(x, f.spectral_k(k));
            double* g2 = g.data() + model.spatial_a_offset(q, k);
            double* g1 = g.data() + model.spatial_b_offset(q, k);
            for (std::size_t j = 0; j < f.side; ++j) {
                double row = 0.0;
                for (std::size_t i = 0; i < f.side; ++i) {
                    row += reduced(j, i) * w1[i];
                    g1[i] += delta * w2[j] * reduced(j, i);
                }
                g2[j] = delta * row;
            }
        }
    }
    return out;
}

LossAndGradients backward(const DenseFNN& model, const Tensor3View& x, std::span<const double> target) {
    const NetworkShape& shape = model.shape();
    const std::size_t cls = target_class(target, shape.classes);
    const ForwardTrace trace = forward(model, x);

    LossAndGradients out;
    out.loss = cross_entropy(trace.probabilities, target);
    out.gradients.values.assign(model.parameter_count(), 0.0);
    std::vector<double> deltas(shape.hidden);
    backprop_head(model, trace, cls, out.gradients.values, deltas);

    const auto xs = x.values();
    for (std::size_t q = 0; q < shape.hidden; ++q) {
        double* gw = out.gradients.values.data() + model.weight_offset(q);
        for (std::size_t n = 0; n < xs.size(); ++n) gw[n] = deltas[q] * xs[n];
    }
    return out;
}

std::size_t argmax(std::span<const double> values) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < values.size(); ++c) {
        if (values[c] > values[best]) best = c;
    }
    return best;
}

std::size_t predict(const RankRFNN& model, const Tensor3View& x) { return argmax(forward(model, x).probabilities); }

std::size_t predict(const DenseFNN& model, const Tensor3View& x) { return argmax(forward(model, x).probabilities); }

std::vector<double> one_hot(std::size_t class_id, std::size_t classes) {
    if (class_id >= classes) throw InvalidArgument("class id out of range");
    std::vector<double> t(classes, 0.0);
    t[class_id] = 1.0;
    return t;
}

// ---------------------------------------------------------------------------
// Batched kernels

RankRGradientAccumulator::RankRGradientAccumulator(const NetworkShape& shape) : shape_(shape) {
    shape_.validate(true);
    const std::size_t rows = shape.hidden * shape.rank;
    const std::size_t plane = shape.side * shape.side;
    spectral_.resize(rows * shape.bands);
    reduced_.resize(rows * plane);
    row_sums_.resize(rows * shape.side);
    weighted_.resize(rows * plane);
    spectral_grad_.resize(rows * shape.bands);
    resize_trace(trace_, shape);
}

double RankRGradientAccumulator::accumulate(const RankRFNN& model, std::span<const double> patches,
                                            std::span<const std::size_t> labels, std::span<double> grads) {
    if (model.shape() != shape_) throw ShapeError("accumulator was built for a different model shape");
    require_batch(shape_, patches, labels, grads, model.parameter_count());

    const std::size_t Q = shape_.hidden;
    const std::size_t R = shape_.rank;
    const std::size_t b = shape_.bands;
    const std::size_t s = shape_.side;
    const std::size_t plane = s * s;
    const std::size_t rows = Q * R;
    const std::size_t n = b * plane;
    const auto params = model.parameters();

    // Row r = q * R + k of the gathered matrix is the spectral factor of term k
    // of neuron q.
    for (std::size_t q = 0; q < Q; ++q) {
        for (std::size_t k = 0; k < R; ++k) {
            const double* src = params.data() + model.spectral_offset(q, k);
            std::copy(src, src + b, spectral_.data() + (q * R + k) * b);
        }
    }
    Eigen::Map<const RowMajorMatrix> W3(spectral_.data(), static_cast<Eigen::Index>(rows),
                                        static_cast<Eigen::Index>(b));
    Eigen::Map<RowMajorMatrix> reduced(reduced_.data(), static_cast<Eigen::Index>(rows),
                                       static_cast<Eigen::Index>(plane));
    Eigen::Map<const RowMajorMatrix> weighted(weighted_.data(), static_cast<Eigen::Index>(rows),
                                              static_cast<Eigen::Index>(plane));
    Eigen::Map<RowMajorMatrix> G3(spectral_grad_.data(), static_cast<Eigen::Index>(rows),
                                  static_cast<Eigen::Index>(b));
    G3.setZero();

    std::vector<double> deltas(Q);
    double loss = 0.0;
    for (std::size_t sample = 0; sample < labels.size(); ++sample) {
        Eigen::Map<const RowMajorMatrix> X(patches.data() + sample * n, static_cast<Eigen::Index>(b),
                                           static_cast<Eigen::Index>(plane));
        reduced.noalias() = W3 * X;

        for (std::size_t q = 0; q < Q; ++q) {
            double z = 0.0;
            for (std::size_t k = 0; k < R; ++k) {
                const std::size_t r = q * R + k;
                const double* w2 = params.data() + model.spatial_a_offset(q, k);
                const double* w1 = params.data() + model.spatial_b_offset(q, k);
                const double* red = reduced_.data() + r * plane;
                double* ys = row_sums_.data() + r * s;
                double term = 0.0;
                for (std::size_t j = 0; j < s; ++j) {
                    double y = 0.0;
                    for (std::size_t i = 0; i < s; ++i) y += w1[i] * red[j * s + i];
                    ys[j] = y;
                    term += w2[j] * y;
                }
                z += term;
            }
            trace_.preactivations[q] = z;
        }
        finish_forward(shape_, head_of(model), trace_);
        loss += backprop_head(model, trace_, labels[sample], grads, deltas);

        for (std::size_t q = 0; q < Q; ++q) {
            const double delta = deltas[q];
            for (std::size_t k = 0; k < R; ++k) {
                const std::size_t r = q * R + k;
                const double* w2 = params.data() + model.spatial_a_offset(q, k);
                const double* w1 = params.data() + model.spatial_b_offset(q, k);
                const double* red = reduced_.data() + r * plane;
                const double* ys = row_sums_.data() + r * s;
                double* g2 = grads.data() + model.spatial_a_offset(q, k);
                double* g1 = grads.data() + model.spatial_b_offset(q, k);
                double* wt = weighted_.data() + r * plane;
                for (std::size_t j = 0; j < s; ++j) {
                    g2[j] += delta * ys[j];
                    const double dj = delta * w2[j];
                    for (std::size_t i = 0; i < s; ++i) {
                        g1[i] += dj * red[j * s + i];
                        wt[j * s + i] = dj * w1[i];
                    }
                }
            }
        }
        G3.noalias() += weighted * X.transpose();
    }

    for (std::size_t q = 0; q < Q; ++q) {
        for (std::size_t k = 0; k < R; ++k) {
            const double* src = spectral_grad_.data() + (q * R + k) * b;
            double* dst = grads.data() + model.spectral_offset(q, k);
            for (std::size_t m = 0; m < b; ++m) dst[m] += src[m];
        }
    }
    return loss;
}

DenseGradientAccumulator::DenseGradientAccumulator(const NetworkShape& shape) : shape_(shape) {
    shape_.rank = 0;
    shape_.validate(false);
    resize_trace(trace_, shape);
}

double DenseGradientAccumulator::accumulate(const DenseFNN& model, std::span<const double> patches,
                                            std::span<const std::size_t> labels, std::span<double> grads) {
    if (model.shape() != shape_) throw ShapeError("accumulator was built for a different model shape");
    require_batch(shape_, patches, labels, grads, model.parameter_count());

    const auto Q = static_cast<Eigen::Index>(shape_.hidden);
    const auto n = static_cast<Eigen::Index>(shape_.input_dims().size());
    const auto B = static_cast<Eigen::Index>(labels.size());
    preactivations_.resize(static_cast<std::size_t>(Q * B));
    deltas_.resize(static_cast<std::size_t>(Q * B));

    Eigen::Map<const RowMajorMatrix> W(model.parameters().data(), Q, n);
    Eigen::Map<const ColMajorMatrix> X(patches.data(), n, B);
    Eigen::Map<ColMajorMatrix> Z(preactivations_.data(), Q, B);
    Eigen::Map<ColMajorMatrix> D(deltas_.data(), Q, B);
    Z.noalias() = W * X;

    double loss = 0.0;
    for (Eigen::Index sample = 0; sample < B; ++sample) {
        std::copy_n(preactivations_.data() + sample * Q, Q, trace_.preactivations.begin());
        finish_forward(shape_, head_of(model), trace_);
        loss += backprop_head(model, trace_, labels[static_cast<std::size_t>(sample)], grads,
                              std::span<double>(deltas_.data() + sample * Q, static_cast<std::size_t>(Q)));
    }

    Eigen::Map<RowMajorMatrix> GW(grads.data(), Q, n);
    GW.noalias() += D * X.transpose();
    return loss;
}

}  // namespace rrfnn
