#include <benchmark/benchmark.h>

#include <map>

#include "rrfnn/evaluate.hpp"
#include "rrfnn/optim.hpp"
#include "rrfnn/random.hpp"
#include "rrfnn/sampling.hpp"
#include "rrfnn/synth.hpp"

using namespace rrfnn;

namespace {

std::vector<double> random_values(std::size_t n, Rng& rng) {
    std::vector<double> v(n);
    for (double& x : v) x = rng.uniform(-1.0, 1.0);
    return v;
}

NetworkShape shape_for(std::size_t side) {
    NetworkShape s;
    s.side = side;
    return s;
}

const SamplePool& pool_for(std::size_t side) {
    static const auto images = [] {
        Scene scene = generate_scene(SceneConfig{});
        return std::vector<std::shared_ptr<const LabeledImage>>{
            std::make_shared<LabeledImage>(LabeledImage{normalize_bandwise(scene.cube), std::move(scene.labels)})};
    }();
    static std::map<std::size_t, SamplePool> pools;
    auto it = pools.find(side);
    if (it == pools.end()) it = pools.emplace(side, build_sample_pool(images, side, 4)).first;
    return it->second;
}

void BM_CpInner(benchmark::State& state) {
    const auto side = static_cast<std::size_t>(state.range(0));
    Rng rng(1);
    CPFactorSet f(3, 42, side);
    for (std::size_t k = 0; k < 3; ++k) {
        for (double& v : f.spectral(k)) v = rng.uniform();
        for (double& v : f.spatial_a(k)) v = rng.uniform();
        for (double& v : f.spatial_b(k)) v = rng.uniform();
    }
    const Dims3 dims{42, side, side};
    const Tensor3 x(dims, random_values(dims.size(), rng));
    for (auto _ : state) benchmark::DoNotOptimize(cp_inner(f, x));
}
BENCHMARK(BM_CpInner)->Arg(9)->Arg(15)->Arg(21);

void BM_DenseInner(benchmark::State& state) {
    const auto side = static_cast<std::size_t>(state.range(0));
    Rng rng(1);
    const Dims3 dims{42, side, side};
    const Tensor3 w(dims, random_values(dims.size(), rng));
    const Tensor3 x(dims, random_values(dims.size(), rng));
    for (auto _ : state) benchmark::DoNotOptimize(inner(w, x));
}
BENCHMARK(BM_DenseInner)->Arg(9)->Arg(15)->Arg(21);

template <class Model>
void BM_TrainEpoch(benchmark::State& state) {
    const auto side = static_cast<std::size_t>(state.range(0));
    const SamplePool& pool = pool_for(side);
    const Split split = split_train_test(pool, {50, 0, 0}, 4);
    const PoolSubset train_set(pool, split.train);
    Model model(shape_for(side));
    initialize(model, 7);
    TrainConfig config;
    config.epochs = 1;
    for (auto _ : state) benchmark::DoNotOptimize(train(model, train_set, config).loss_history);
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * train_set.size()));
}
BENCHMARK_TEMPLATE(BM_TrainEpoch, RankRFNN)->Arg(9)->Arg(21)->Unit(benchmark::kMillisecond);
BENCHMARK_TEMPLATE(BM_TrainEpoch, DenseFNN)->Arg(9)->Arg(21)->Unit(benchmark::kMillisecond);

template <class Model>
void BM_PredictImage(benchmark::State& state) {
    const auto side = static_cast<std::size_t>(state.range(0));
    const SamplePool& pool = pool_for(side);
    Model model(shape_for(side));
    initialize(model, 7);
    const HyperCube& cube = pool.images().front()->cube;
    for (auto _ : state) benchmark::DoNotOptimize(predict_image(model, cube));
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * cube.height() * cube.width()));
}
BENCHMARK_TEMPLATE(BM_PredictImage, RankRFNN)->Arg(9)->Arg(21)->Unit(benchmark::kMillisecond);
BENCHMARK_TEMPLATE(BM_PredictImage, DenseFNN)->Arg(9)->Arg(21)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
