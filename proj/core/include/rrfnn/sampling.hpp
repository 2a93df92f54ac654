#pragma once

// Sample pools, per-class train/test splits and the PatchSource interface the
// trainer and evaluator consume.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "rrfnn/cube.hpp"

namespace rrfnn {

/// A normalized cube with its ground truth.
struct LabeledImage {
    HyperCube cube;
    LabelMap labels;
};

/// Random-access set of labeled patches of a fixed shape.
class PatchSource {
public:
    virtual ~PatchSource() = default;
    virtual std::size_t size() const = 0;
    virtual Dims3 dims() const = 0;
    virtual std::size_t label(std::size_t i) const = 0;
    /// Writes patch i (dims().size() values) into `out`.
    virtual void fill(std::size_t i, std::span<double> out) const = 0;
};

struct SampleRef {
    std::uint32_t image = 0;
    std::uint32_t row = 0;
    std::uint32_t col = 0;
    std::uint8_t label = 0;
};

/// Every labeled interior pixel of a set of images, in image order then
/// row-major. Patches are cut on demand, never stored.
class SamplePool final : public PatchSource {
public:
    SamplePool(std::vector<std::shared_ptr<const LabeledImage>> images, std::size_t side, std::size_t classes,
               std::vector<SampleRef> samples);

    std::size_t size() const override { return samples_.size(); }
    Dims3 dims() const override { return dims_; }
    std::size_t label(std::size_t i) const override { return samples_[i].label; }
    void fill(std::size_t i, std::span<double> out) const override;

    std::size_t side() const noexcept { return side_; }
    std::size_t classes() const noexcept { return classes_; }
    const SampleRef& sample(std::size_t i) const { return samples_[i]; }
    std::span<const SampleRef> samples() const noexcept { return samples_; }
    const std::vector<std::shared_ptr<const LabeledImage>>& images() const noexcept { return images_; }

    PatchTensor patch(std::size_t i) const;
    std::vector<std::size_t> class_counts() const;

private:
    std::vector<double> one_hot_label(std::size_t label) const;

    std::vector<std::shared_ptr<const LabeledImage>> images_;
    std::size_t side_;
    std::size_t classes_;
    Dims3 dims_;
    std::vector<SampleRef> samples_;
};

/// Pool of all labeled interior pixels. Throws ShapeError if a cube and its
/// labels differ in size or the cubes disagree on band count, InvalidArgument
/// for an even side or a class id >= classes.
SamplePool build_sample_pool(std::vector<std::shared_ptr<const LabeledImage>> images, std::size_t side,
                             std::size_t classes);

/// Subset of a pool selected by index; the pool must outlive it.
class PoolSubset final : public PatchSource {
public:
    PoolSubset(const SamplePool& pool, std::vector<std::size_t> indices)
        : pool_(&pool), indices_(std::move(indices)) {}

    std::size_t size() const override { return indices_.size(); }
    Dims3 dims() const override { return pool_->dims(); }
    std::size_t label(std::size_t i) const override { return pool_->label(indices_[i]); }
    void fill(std::size_t i, std::span<double> out) const override { pool_->fill(indices_[i], out); }

    const SamplePool& pool() const noexcept { return *pool_; }
    std::span<const std::size_t> indices() const noexcept { return indices_; }

private:
    const SamplePool* pool_;
    std::vector<std::size_t> indices_;
};

/// Materialized patches.
class PatchList final : public PatchSource {
public:
    /// All patches must share dims; throws ShapeError otherwise.
    explicit PatchList(std::vector<PatchTensor> patches);

    std::size_t size() const override { return patches_.size(); }
    Dims3 dims() const override { return dims_; }
    std::size_t label(std::size_t i) const override { return labels_[i]; }
    void fill(std::size_t i, std::span<double> out) const override;

    const PatchTensor& operator[](std::size_t i) const { return patches_[i]; }

private:
    std::vector<PatchTensor> patches_;
    std::vector<std::size_t> labels_;
    Dims3 dims_;
};

struct SplitSpec {
    std::size_t samples_per_class = 50;  ///< TS
    std::uint64_t seed = 0;
    std::uint64_t repeat_index = 0;
};

/// Pool indices of a train/test split.
struct Split {
    std::vector<std::size_t> train;  ///< permuted
    std::vector<std::size_t> test;   ///< ascending
};

/// Draws exactly TS pool samples per class without replacement, using an Rng
/// seeded with derive_seed({seed, repeat_index}); classes are visited in
/// ascending order and each draw is a partial Fisher-Yates over that class's
/// pool indices. Everything else becomes the test set. The train set is then
/// shuffled with the same generator. Throws InsufficientSamples naming the
/// class when it has fewer than TS samples.
Split split_train_test(const SamplePool& pool, const SplitSpec& spec, std::size_t classes);

}  // namespace rrfnn
