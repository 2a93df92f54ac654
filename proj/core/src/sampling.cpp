#include "rrfnn/sampling.hpp"

#include <algorithm>
#include <string>

#include "rrfnn/errors.hpp"
#include "rrfnn/random.hpp"

namespace rrfnn {

SamplePool::SamplePool(std::vector<std::shared_ptr<const LabeledImage>> images, std::size_t side,
                       std::size_t classes, std::vector<SampleRef> samples)
    : images_(std::move(images)), side_(side), classes_(classes), samples_(std::move(samples)) {
    const std::size_t bands = images_.empty() ? 0 : images_.front()->cube.bands();
    dims_ = Dims3{bands, side, side};
}

void SamplePool::fill(std::size_t i, std::span<double> out) const {
    const SampleRef& s = samples_[i];
    extract_patch_into(images_[s.image]->cube, s.row, s.col, side_, out);
}

PatchTensor SamplePool::patch(std::size_t i) const {
    const SampleRef& s = samples_[i];
    return {extract_patch(images_[s.image]->cube, s.row, s.col, side_), one_hot_label(s.label), {s.row, s.col}};
}

std::vector<double> SamplePool::one_hot_label(std::size_t label) const {
    std::vector<double> t(classes_, 0.0);
    t[label] = 1.0;
    return t;
}

std::vector<std::size_t> SamplePool::class_counts() const {
    std::vector<std::size_t> counts(classes_, 0);
    for (const SampleRef& s : samples_) ++counts[s.label];
    return counts;
}

SamplePool build_sample_pool(std::vector<std::shared_ptr<const LabeledImage>> images, std::size_t side,
                             std::size_t classes) {
    if (side % 2 == 0) throw InvalidArgument("patch side must be odd, got " + std::to_string(side));
    if (classes < 1 || classes > kUnlabeled) throw InvalidArgument("class count must be in [1, 255]");

    std::vector<SampleRef> samples;
    for (std::size_t n = 0; n < images.size(); ++n) {
        const LabeledImage& img = *images[n];
        const HyperCube& cube = img.cube;
        const LabelMap& labels = img.labels;
        if (cube.height() != labels.height() || cube.width() != labels.width()) {
            throw ShapeError("image " + std::to_string(n) + ": cube is " + std::to_string(cube.height()) + "x" +
                             std::to_string(cube.width()) + " but labels are " + std::to_string(labels.height()) +
                             "x" + std::to_string(labels.width()));
        }
        if (cube.bands() != images.front()->cube.bands()) {
            throw ShapeError("image " + std::to_string(n) + " has " + std::to_string(cube.bands()) +
                             " bands, image 0 has " + std::to_string(images.front()->cube.bands()));
        }
        for (std::size_t r = 0; r < cube.height(); ++r) {
            for (std::size_t c = 0; c < cube.width(); ++c) {
                const std::uint8_t l = labels(r, c);
                if (l == kUnlabeled) continue;
                if (l >= classes) {
                    throw InvalidArgument("image " + std::to_string(n) + ": label " + std::to_string(l) +
                                          " at (" + std::to_string(r) + ", " + std::to_string(c) +
                                          ") exceeds class count " + std::to_string(classes));
                }
                if (!has_patch(cube.height(), cube.width(), r, c, side)) continue;
                samples.push_back({static_cast<std::uint32_t>(n), static_cast<std::uint32_t>(r),
                                   static_cast<std::uint32_t>(c), l});
            }
        }
    }
    return SamplePool(std::move(images), side, classes, std::move(samples));
}

PatchList::PatchList(std::vector<PatchTensor> patches) : patches_(std::move(patches)) {
    if (!patches_.empty()) dims_ = patches_.front().tensor.dims();
    labels_.reserve(patches_.size());
    for (const PatchTensor& p : patches_) {
        if (p.tensor.dims() != dims_) {
            throw ShapeError("patch list mixes dims " + to_string(dims_) + " and " + to_string(p.tensor.dims()));
        }
        const std::size_t c = p.class_id();
        if (c >= p.label.size()) throw InvalidArgument("patch label is not one-hot");
        labels_.push_back(c);
    }
}

void PatchList::fill(std::size_t i, std::span<double> out) const {
    const auto src = patches_[i].tensor.values();
    if (out.size() != src.size()) throw ShapeError("patch buffer has the wrong size");
    std::copy(src.begin(), src.end(), out.begin());
}

Split split_train_test(const SamplePool& pool, const SplitSpec& spec, std::size_t classes) {
    if (spec.samples_per_class == 0) throw InvalidArgument("samples per class must be at least 1");

    std::vector<std::vector<std::size_t>> by_class(classes);
    for (std::size_t i = 0; i < pool.size(); ++i) {
        const std::size_t l = pool.label(i);
        if (l >= classes) throw InvalidArgument("pool label exceeds class count");
        by_class[l].push_back(i);
    }
    for (std::size_t c = 0; c < classes; ++c) {
        if (by_class[c].size() < spec.samples_per_class) {
            throw InsufficientSamples("class " + std::to_string(c) + " has " + std::to_string(by_class[c].size()) +
                                      " samples in the pool, " + std::to_string(spec.samples_per_class) +
                                      " requested per class");
        }
    }

    Rng rng(derive_seed({spec.seed, spec.repeat_index}));
    Split split;
    split.train.reserve(classes * spec.samples_per_class);
    for (auto& members : by_class) {
        const std::size_t n = members.size();
        for (std::size_t t = 0; t < spec.samples_per_class; ++t) {
            const std::size_t j = t + static_cast<std::size_t>(rng.below(n - t));
            std::swap(members[t], members[j]);
            split.train.push_back(members[t]);
        }
        split.test.insert(split.test.end(), members.begin() + static_cast<std::ptrdiff_t>(spec.samples_per_class),
                          members.end());
    }
    std::sort(split.test.begin(), split.test.end());
    shuffle(std::span(split.train), rng);
    return split;
}

}  // namespace rrfnn
