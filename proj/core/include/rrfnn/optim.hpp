#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "rrfnn/model.hpp"
#include "rrfnn/sampling.hpp"

namespace rrfnn {

struct AdamHyper {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;

    void validate() const;
};

/// Moments of one parameter vector.
struct AdamState {
    AdamState(std::size_t parameter_count, AdamHyper hyper);

    AdamHyper hyper;
    std::uint64_t step_count = 0;
    std::vector<double> first_moment;
    std::vector<double> second_moment;
};

/// One bias-corrected Adam update:
///   m <- b1 m + (1 - b1) g,  v <- b2 v + (1 - b2) g^2
///   theta <- theta - lr * (m / (1 - b1^t)) / (sqrt(v / (1 - b2^t)) + eps)
/// Throws ShapeError when params, grads and state differ in length.
void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state);

struct TrainConfig {
    std::size_t epochs = 100;
    std::size_t batch_size = 16;
    AdamHyper adam;
    std::uint64_t seed = 0;
    bool shuffle_each_epoch = true;

    /// Throws InvalidArgument for epochs or batch_size of 0 and bad Adam values.
    void validate() const;
};

struct TrainResult {
    std::vector<double> loss_history;  ///< mean training loss per epoch
};

/// Called after every epoch with (epoch, mean loss).
using EpochCallback = std::function<void(std::size_t, double)>;

/// Mini-batch Adam on the mean batch cross-entropy, starting from the model's
/// current parameters. Runs epochs x ceil(N / batch_size) steps; the last
/// partial batch is kept. Sample order is reshuffled each epoch (Fisher-Yates,
/// seeded from config.seed) when shuffle_each_epoch is set.
///
/// Throws InvalidArgument on an empty train set, ShapeError if the patches do
/// not fit the model, DivergedError if an epoch's loss is not finite.
TrainResult train(RankRFNN& model, const PatchSource& train_set, const TrainConfig& config,
                  const EpochCallback& on_epoch = {});
TrainResult train(DenseFNN& model, const PatchSource& train_set, const TrainConfig& config,
                  const EpochCallback& on_epoch = {});

}  // namespace rrfnn
