#pragma once

// One-hidden-layer networks over (bands, side, side) patches.
//
// RankRFNN constrains every hidden weight tensor to a sum of `rank` outer
// products spectral ∘ spatial_a ∘ spatial_b; DenseFNN is the same topology
// with unconstrained weight tensors. Both read
//
//     z_q = <W_q, x> (+ b_q)      u_q = g(z_q)
//     logit_c = sum_q V[c][q] u_q (+ d_c)      p = softmax(logits)
//
// and are trained on the cross-entropy of p against a one-hot target.
//
// Parameters live in one flat vector so the optimizer can treat every model
// alike. RankRFNN layout, in order:
//   for each neuron q: spectral factors of all terms (rank x bands), then
//   spatial_a factors (rank x side), then spatial_b factors (rank x side);
//   V row-major (classes x hidden); hidden biases; output biases.
// DenseFNN layout: hidden weight tensors q = 0..Q-1, then V and biases as
// above. Biases are present only when use_bias is set.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "rrfnn/tensor.hpp"

namespace rrfnn {

enum class Activation : std::uint32_t { sigmoid = 0, relu = 1, tanh = 2 };

std::string_view to_string(Activation activation);
/// Accepts "sigmoid", "relu" or "tanh"; throws InvalidArgument otherwise.
Activation parse_activation(std::string_view name);

double activate(Activation activation, double z);
/// g'(z) for the given activation. ReLU uses g'(0) = 0.
double activation_derivative(Activation activation, double z);

struct NetworkShape {
    std::size_t hidden = 10;  ///< Q
    std::size_t rank = 3;     ///< R; ignored by DenseFNN
    std::size_t classes = 4;  ///< C
    std::size_t side = 9;     ///< s
    std::size_t bands = 42;   ///< b
    Activation activation = Activation::sigmoid;
    bool use_bias = false;

    Dims3 input_dims() const noexcept { return {bands, side, side}; }
    /// Throws InvalidArgument when a dimension is out of range.
    void validate(bool uses_rank) const;
    friend bool operator==(const NetworkShape&, const NetworkShape&) = default;
};

/// Q R (2s + b) + C Q, plus Q + C with biases.
std::size_t rank_r_param_count(const NetworkShape& shape);
/// Q s^2 b + C Q, plus Q + C with biases.
std::size_t dense_param_count(const NetworkShape& shape);

struct ForwardTrace {
    std::vector<double> preactivations;  // z, length Q
    std::vector<double> hidden;          // u, length Q
    std::vector<double> logits;          // length C
    std::vector<double> probabilities;   // length C
};

/// Same flat layout as the parameters of the model that produced it.
struct GradientSet {
    std::vector<double> values;
};

struct LossAndGradients {
    double loss = 0.0;
    GradientSet gradients;
};

class RankRFNN {
public:
    /// Zero-initialized model.
    explicit RankRFNN(const NetworkShape& shape);

    const NetworkShape& shape() const noexcept { return shape_; }
    std::size_t parameter_count() const noexcept { return params_.size(); }
    std::span<double> parameters() noexcept { return params_; }
    std::span<const double> parameters() const noexcept { return params_; }

    CPFactorView factors(std::size_t q) const;

    std::size_t spectral_offset(std::size_t q, std::size_t k) const noexcept;
    std::size_t spatial_a_offset(std::size_t q, std::size_t k) const noexcept;
    std::size_t spatial_b_offset(std::size_t q, std::size_t k) const noexcept;
    std::size_t output_weights_offset() const noexcept { return head_offset_; }
    std::size_t hidden_bias_offset() const noexcept { return head_offset_ + shape_.classes * shape_.hidden; }
    std::size_t output_bias_offset() const noexcept { return hidden_bias_offset() + shape_.hidden; }

    std::span<double> spectral(std::size_t q, std::size_t k);
    std::span<double> spatial_a(std::size_t q, std::size_t k);
    std::span<double> spatial_b(std::size_t q, std::size_t k);
    /// V row-major, classes x hidden.
    std::span<double> output_weights();
    std::span<const double> output_weights() const;
    /// Empty when the model has no biases.
    std::span<double> hidden_bias();
    std::span<const double> hidden_bias() const;
    std::span<double> output_bias();
    std::span<const double> output_bias() const;

private:
    NetworkShape shape_;
    std::size_t block_ = 0;  // parameters per neuron, R (b + 2s)
    std::size_t head_offset_ = 0;
    std::vector<double> params_;
};

class DenseFNN {
public:
    /// The stored shape always has rank 0.
    explicit DenseFNN(const NetworkShape& shape);

    const NetworkShape& shape() const noexcept { return shape_; }
    std::size_t parameter_count() const noexcept { return params_.size(); }
    std::span<double> parameters() noexcept { return params_; }
    std::span<const double> parameters() const noexcept { return params_; }

    std::size_t weight_offset(std::size_t q) const noexcept { return q * shape_.input_dims().size(); }
    std::size_t output_weights_offset() const noexcept { return head_offset_; }
    std::size_t hidden_bias_offset() const noexcept { return head_offset_ + shape_.classes * shape_.hidden; }
    std::size_t output_bias_offset() const noexcept { return hidden_bias_offset() + shape_.hidden; }

    Tensor3View weight(std::size_t q) const;
    std::span<double> weight_values(std::size_t q);
    std::span<double> output_weights();
    std::span<const double> output_weights() const;
    std::span<double> hidden_bias();
    std::span<const double> hidden_bias() const;
    std::span<double> output_bias();
    std::span<const double> output_bias() const;

private:
    NetworkShape shape_;
    std::size_t head_offset_ = 0;
    std::vector<double> params_;
};

std::size_t param_count(const RankRFNN& model);
std::size_t param_count(const DenseFNN& model);

/// Dense model whose hidden weights are the reconstructed CP tensors and whose
/// output layer is copied verbatim.
DenseFNN to_dense(const RankRFNN& model);

/// Seeded uniform initialization. CP factors are drawn from (-beta, beta) with
/// beta = sqrt(6 / (R (2s + b) + Q)) / cbrt(R); dense hidden weights from
/// (-sqrt(6 / (s^2 b + Q)), ..); V from (-sqrt(3 / Q), ..). Every bound is
/// multiplied by `scale`. Biases start at zero.
void initialize(RankRFNN& model, std::uint64_t seed, double scale = 1.0);
void initialize(DenseFNN& model, std::uint64_t seed, double scale = 1.0);

ForwardTrace forward(const RankRFNN& model, const Tensor3View& x);
ForwardTrace forward(const DenseFNN& model, const Tensor3View& x);

/// Finishes a forward pass whose trace.preactivations hold the raw hidden
/// contractions (no bias yet); sizes the other fields as needed.
void complete_forward(const RankRFNN& model, ForwardTrace& trace);
void complete_forward(const DenseFNN& model, ForwardTrace& trace);

/// -log(max(p[c*], 1e-12)) for the target class c*. Throws InvalidArgument if
/// the target is not one-hot or the probabilities do not sum to one.
double cross_entropy(std::span<const double> probabilities, std::span<const double> target);

/// Loss and its gradient with respect to every parameter, for one sample.
LossAndGradients backward(const RankRFNN& model, const Tensor3View& x, std::span<const double> target);
LossAndGradients backward(const DenseFNN& model, const Tensor3View& x, std::span<const double> target);

/// Index of the largest entry; ties resolve to the lowest index.
std::size_t argmax(std::span<const double> values);

std::size_t predict(const RankRFNN& model, const Tensor3View& x);
std::size_t predict(const DenseFNN& model, const Tensor3View& x);

std::vector<double> one_hot(std::size_t class_id, std::size_t classes);

/// Batched gradient kernels used by the trainer. `patches` holds
/// labels.size() patches back to back in the tensor layout; the summed
/// gradients are added to `grads` and the summed loss is returned. The
/// accumulator owns scratch buffers and is not thread-safe; use one per
/// training run.
class RankRGradientAccumulator {
public:
    explicit RankRGradientAccumulator(const NetworkShape& shape);
    double accumulate(const RankRFNN& model, std::span<const double> patches, std::span<const std::size_t> labels,
                      std::span<double> grads);

private:
    NetworkShape shape_;
    std::vector<double> spectral_;   // QR x b, gathered spectral factors
    std::vector<double> reduced_;    // QR x s^2
    std::vector<double> row_sums_;   // QR x s
    std::vector<double> weighted_;   // QR x s^2, delta-scaled spatial outer products
    std::vector<double> spectral_grad_;  // QR x b
    ForwardTrace trace_;
};

class DenseGradientAccumulator {
public:
    explicit DenseGradientAccumulator(const NetworkShape& shape);
    double accumulate(const DenseFNN& model, std::span<const double> patches, std::span<const std::size_t> labels,
                      std::span<double> grads);

private:
    NetworkShape shape_;
    std::vector<double> preactivations_;  // Q x batch
    std::vector<double> deltas_;          // Q x batch
    ForwardTrace trace_;
};

}  // namespace rrfnn
