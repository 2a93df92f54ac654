#include "rrfnn/optim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "rrfnn/errors.hpp"
#include "rrfnn/random.hpp"

namespace rrfnn {

void AdamHyper::validate() const {
    if (!(learning_rate > 0.0)) throw InvalidArgument("learning rate must be positive");
    if (!(beta1 >= 0.0 && beta1 < 1.0)) throw InvalidArgument("beta1 must lie in [0, 1)");
    if (!(beta2 >= 0.0 && beta2 < 1.0)) throw InvalidArgument("beta2 must lie in [0, 1)");
    if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
}

AdamState::AdamState(std::size_t parameter_count, AdamHyper h)
    : hyper(h), first_moment(parameter_count, 0.0), second_moment(parameter_count, 0.0) {
    hyper.validate();
}

void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state) {
    if (params.size() != grads.size() || params.size() != state.first_moment.size() ||
        params.size() != state.second_moment.size()) {
        throw ShapeError("adam_step: parameters (" + std::to_string(params.size()) + "), gradients (" +
                         std::to_string(grads.size()) + ") and moments (" +
                         std::to_string(state.first_moment.size()) + ") must have equal length");
    }
    const AdamHyper& h = state.hyper;
    ++state.step_count;
    const double t = static_cast<double>(state.step_count);
    const double correction1 = 1.0 - std::pow(h.beta1, t);
    const double correction2 = 1.0 - std::pow(h.beta2, t);

    double* m = state.first_moment.data();
    double* v = state.second_moment.data();
    for (std::size_t n = 0; n < params.size(); ++n) {
        const double g = grads[n];
        m[n] = h.beta1 * m[n] + (1.0 - h.beta1) * g;
        v[n] = h.beta2 * v[n] + (1.0 - h.beta2) * g * g;
        const double m_hat = m[n] / correction1;
        const double v_hat = v[n] / correction2;
        params[n] -= h.learning_rate * m_hat / (std::sqrt(v_hat) + h.epsilon);
    }
}

void TrainConfig::validate() const {
    if (epochs == 0) throw InvalidArgument("epochs must be at least 1");
    if (batch_size == 0) throw InvalidArgument("batch size must be at least 1");
    adam.validate();
}

namespace {

template <class Model, class Accumulator>
TrainResult train_impl(Model& model, const PatchSource& train_set, const TrainConfig& config,
                       const EpochCallback& on_epoch) {
    config.validate();
    const std::size_t N = train_set.size();
    if (N == 0) throw InvalidArgument("train set is empty");
    const Dims3 dims = model.shape().input_dims();
    if (train_set.dims() != dims) {
        throw ShapeError("train patches have dims " + to_string(train_set.dims()) + ", model expects " +
                         to_string(dims));
    }

    Accumulator accumulator(model.shape());
    AdamState state(model.parameter_count(), config.adam);
    std::vector<double> grads(model.parameter_count());
    std::vector<double> batch(config.batch_size * dims.size());
    std::vector<std::size_t> labels;
    labels.reserve(config.batch_size);

    std::vector<std::size_t> order(N);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(derive_seed({config.seed, 0x5348554646ULL}));

    TrainResult result;
    result.loss_history.reserve(config.epochs);
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        if (config.shuffle_each_epoch) shuffle(std::span(order), rng);
        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < N; start += config.batch_size) {
            const std::size_t B = std::min(config.batch_size, N - start);
            labels.clear();
            for (std::size_t b = 0; b < B; ++b) {
                const std::size_t i = order[start + b];
                train_set.fill(i, std::span(batch).subspan(b * dims.size(), dims.size()));
                labels.push_back(train_set.label(i));
            }
            std::fill(grads.begin(), grads.end(), 0.0);
            const double batch_loss = accumulator.accumulate(
                model, std::span<const double>(batch).subspan(0, B * dims.size()), labels, grads);
            const double inv = 1.0 / static_cast<double>(B);
            for (double& g : grads) g *= inv;
            epoch_loss += batch_loss;
            adam_step(model.parameters(), grads, state);
        }
        const double mean_loss = epoch_loss / static_cast<double>(N);
        if (!std::isfinite(mean_loss)) {
            throw DivergedError("training diverged: non-finite loss in epoch " + std::to_string(epoch), epoch);
        }
        result.loss_history.push_back(mean_loss);
        if (on_epoch) on_epoch(epoch, mean_loss);
    }
    return result;
}

}  // namespace

TrainResult train(RankRFNN& model, const PatchSource& train_set, const TrainConfig& config,
                  const EpochCallback& on_epoch) {
    return train_impl<RankRFNN, RankRGradientAccumulator>(model, train_set, config, on_epoch);
}

TrainResult train(DenseFNN& model, const PatchSource& train_set, const TrainConfig& config,
                  const EpochCallback& on_epoch) {
    return train_impl<DenseFNN, DenseGradientAccumulator>(model, train_set, config, on_epoch);
}

}  // namespace rrfnn
