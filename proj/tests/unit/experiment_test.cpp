#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "rrfnn/errors.hpp"
#include "rrfnn/experiment.hpp"
#include "rrfnn/random.hpp"
#include "rrfnn/synth.hpp"

using namespace rrfnn;

namespace {

std::vector<std::shared_ptr<const LabeledImage>> small_scene(double noise, std::uint64_t seed = 3) {
    SceneConfig sc;
    sc.height = 28;
    sc.width = 28;
    sc.bands = 6;
    sc.classes = 3;
    sc.region_granularity = 9.0;
    sc.noise_std = noise;
    sc.brightness_jitter = noise > 0 ? 0.05 : 0.0;
    sc.majority_class = 0;
    sc.majority_weight = 1.0;
    sc.seed = seed;
    Scene scene = generate_scene(sc);
    return {std::make_shared<LabeledImage>(LabeledImage{normalize_bandwise(scene.cube), scene.labels})};
}

ExperimentGrid small_grid() {
    ExperimentGrid g;
    g.tws_values = {1, 3};
    g.ts_values = {4, 8};
    g.repeats = 2;
    g.model.hidden = 4;
    g.model.rank = 2;
    g.model.classes = 3;
    g.model.bands = 6;
    g.train.epochs = 3;
    g.train.batch_size = 4;
    g.train.adam.learning_rate = 0.01;
    g.base_seed = 11;
    return g;
}

std::string runs_without_wall(const GridResult& r, std::size_t classes) {
    std::ostringstream out;
    write_runs_csv(out, r.runs, classes);
    std::string text, line;
    std::istringstream in(out.str());
    while (std::getline(in, line)) text += line.substr(0, line.rfind(',')) + "\n";
    return text;
}

std::string summary_csv(const GridResult& r, std::size_t classes) {
    std::ostringstream out;
    write_summary_csv(out, r.cells, classes);
    return out.str();
}

}  // namespace

TEST(Variant, RoundTrip) {
    EXPECT_EQ(parse_variant("rank_r_fnn"), Variant::rank_r_fnn);
    EXPECT_EQ(parse_variant(to_string(Variant::dense_fnn)), Variant::dense_fnn);
    EXPECT_THROW(parse_variant("cnn"), InvalidArgument);
}

TEST(Seeds, SplitIgnoresVariantRunSeedDoesNot) {
    EXPECT_EQ(split_seed(0, 9, 50), derive_seed({0, 9, 50}));
    EXPECT_EQ(run_seed(0, 9, 50, Variant::dense_fnn, 3), derive_seed({0, 9, 50, 1, 3}));
    std::set<std::uint64_t> seen;
    for (std::size_t tws : {9u, 15u})
        for (std::size_t ts : {50u, 100u})
            for (Variant v : {Variant::rank_r_fnn, Variant::dense_fnn})
                for (std::size_t r = 0; r < 10; ++r) seen.insert(run_seed(7, tws, ts, v, r));
    EXPECT_EQ(seen.size(), 80u);
}

TEST(ExperimentGrid, Validation) {
    ExperimentGrid g = small_grid();
    EXPECT_NO_THROW(g.validate());
    EXPECT_EQ(g.run_count(), 16u);
    auto bad = [&](auto mutate) {
        ExperimentGrid b = small_grid();
        mutate(b);
        EXPECT_THROW(b.validate(), InvalidArgument);
    };
    bad([](ExperimentGrid& b) { b.tws_values = {4}; });
    bad([](ExperimentGrid& b) { b.tws_values.clear(); });
    bad([](ExperimentGrid& b) { b.ts_values = {0}; });
    bad([](ExperimentGrid& b) { b.repeats = 1; });
    bad([](ExperimentGrid& b) { b.variants.clear(); });
    bad([](ExperimentGrid& b) { b.confidence = 1.0; });
    bad([](ExperimentGrid& b) { b.train.epochs = 0; });
    bad([](ExperimentGrid& b) { b.model.hidden = 0; });
}

TEST(RunSingle, PairedSplitsAcrossVariants) {
    const auto images = small_scene(0.05);
    const ExperimentGrid g = small_grid();
    const SamplePool pool = build_sample_pool(images, 3, 3);
    for (std::size_t r = 0; r < 2; ++r) {
        const RunResult a = run_single(g, pool, 8, Variant::rank_r_fnn, r);
        const RunResult b = run_single(g, pool, 8, Variant::dense_fnn, r);
        EXPECT_EQ(a.train_size, 24u);
        EXPECT_EQ(a.train_size + a.test_size, pool.size());
        EXPECT_EQ(a.test_size, b.test_size);
        EXPECT_EQ(a.evaluation.class_totals, b.evaluation.class_totals);
        EXPECT_NE(a.seed, b.seed);
        EXPECT_EQ(a.loss_history.size(), 3u);
    }
}

TEST(RunSingle, InsufficientSamplesNamesCell) {
    const auto images = small_scene(0.05);
    const SamplePool pool = build_sample_pool(images, 3, 3);
    try {
        run_single(small_grid(), pool, 100000, Variant::rank_r_fnn, 0);
        FAIL();
    } catch (const InsufficientSamples& e) {
        EXPECT_NE(std::string(e.what()).find("TWS=3, TS=100000"), std::string::npos);
    }
}

TEST(RunGrid, LayoutAndCsvShape) {
    const auto images = small_scene(0.05);
    const ExperimentGrid g = small_grid();
    const GridResult r = run_grid(g, images, 1);
    ASSERT_EQ(r.runs.size(), 16u);
    ASSERT_EQ(r.cells.size(), 8u);
    std::size_t n = 0;
    for (std::size_t tws : g.tws_values)
        for (std::size_t ts : g.ts_values)
            for (Variant v : g.variants)
                for (std::size_t rep = 0; rep < g.repeats; ++rep, ++n) {
                    const RunResult& run = r.runs[n];
                    EXPECT_EQ(run.tws, tws);
                    EXPECT_EQ(run.ts, ts);
                    EXPECT_EQ(run.variant, v);
                    EXPECT_EQ(run.repeat, rep);
                    EXPECT_EQ(run.seed, run_seed(g.base_seed, tws, ts, v, rep));
                }
    EXPECT_TRUE(r.warnings.empty());

    std::ostringstream runs;
    write_runs_csv(runs, r.runs, 3);
    std::istringstream in(runs.str());
    std::string header;
    std::getline(in, header);
    EXPECT_EQ(header, "variant,tws,ts,repeat,seed,overall_acc,acc_class_0,acc_class_1,acc_class_2,loss_final,wall_ms");
    std::size_t lines = 0;
    for (std::string line; std::getline(in, line);) ++lines;
    EXPECT_EQ(lines, 16u);

    const std::string summary = summary_csv(r, 3);
    EXPECT_EQ(summary.substr(0, summary.find('\n')),
              "variant,tws,ts,n,mean_acc,std_acc,ci_low,ci_high,"
              "mean_class_0,std_class_0,ci_low_class_0,ci_high_class_0,"
              "mean_class_1,std_class_1,ci_low_class_1,ci_high_class_1,"
              "mean_class_2,std_class_2,ci_low_class_2,ci_high_class_2,mean_loss_final");
    EXPECT_EQ(std::count(summary.begin(), summary.end(), '\n'), 9);
}

TEST(RunGrid, SummariesMatchAggregateOfRuns) {
    const auto images = small_scene(0.05);
    const ExperimentGrid g = small_grid();
    const GridResult r = run_grid(g, images, 2);
    for (std::size_t cell = 0; cell < r.cells.size(); ++cell) {
        const double a = r.runs[2 * cell].evaluation.overall_accuracy;
        const double b = r.runs[2 * cell + 1].evaluation.overall_accuracy;
        const CellSummary& s = r.cells[cell];
        EXPECT_EQ(s.overall.n, 2u);
        EXPECT_NEAR(s.overall.mean, (a + b) / 2, 1e-15);
        EXPECT_NEAR(s.overall.std, std::abs(a - b) / std::sqrt(2.0), 1e-15);
        EXPECT_LE(s.overall.ci_low, s.overall.mean);
        EXPECT_GE(s.overall.ci_high, s.overall.mean);
        EXPECT_EQ(s.per_class.size(), 3u);
    }
}

TEST(RunGrid, ThreadCountDoesNotChangeResults) {
    const auto images = small_scene(0.05);
    const ExperimentGrid g = small_grid();
    const GridResult one = run_grid(g, images, 1);
    const GridResult three = run_grid(g, images, 3);
    const GridResult again = run_grid(g, images, 1);
    EXPECT_EQ(runs_without_wall(one, 3), runs_without_wall(three, 3));
    EXPECT_EQ(runs_without_wall(one, 3), runs_without_wall(again, 3));
    EXPECT_EQ(summary_csv(one, 3), summary_csv(three, 3));
}

TEST(RunGrid, CallbackSeesEveryRunOnce) {
    const auto images = small_scene(0.05);
    const ExperimentGrid g = small_grid();
    std::set<std::size_t> done_values;
    std::size_t calls = 0;
    run_grid(g, images, 3, [&](const RunResult&, std::size_t done, std::size_t total) {
        ++calls;
        done_values.insert(done);
        EXPECT_EQ(total, 16u);
    });
    EXPECT_EQ(calls, 16u);
    EXPECT_EQ(done_values.size(), 16u);
}

TEST(RunGrid, FailureIsRethrown) {
    const auto images = small_scene(0.05);
    ExperimentGrid g = small_grid();
    g.ts_values = {4, 100000};
    EXPECT_THROW(run_grid(g, images, 3), InsufficientSamples);
}

TEST(RunGrid, EmptyTestSetWarnsAndYieldsNaN) {
    // A 3x3 image with one interior pixel per class at side 1.
    std::vector<double> values(9 * 2, 0.0);
    LabelMap labels(3, 3, {0, 0, 0, 1, 1, 1, 2, 2, 2});
    HyperCube cube(3, 3, 2);
    for (std::size_t r = 0; r < 3; ++r) cube(r, 0, 0) = static_cast<double>(r);
    const std::vector<std::shared_ptr<const LabeledImage>> images{
        std::make_shared<LabeledImage>(LabeledImage{cube, labels})};
    ExperimentGrid g = small_grid();
    g.tws_values = {1};
    g.ts_values = {3};
    g.model.bands = 2;
    const GridResult r = run_grid(g, images, 1);
    ASSERT_EQ(r.warnings.size(), 2u);
    EXPECT_NE(r.warnings[0].find("test set is empty"), std::string::npos);
    EXPECT_TRUE(std::isnan(r.runs[0].evaluation.overall_accuracy));
    EXPECT_TRUE(std::isnan(r.cells[0].overall.mean));
}

TEST(RunGrid, NoiselessSceneIsLearnedAlmostPerfectly) {
    const auto images = small_scene(0.0);
    ExperimentGrid g = small_grid();
    g.tws_values = {1};
    g.ts_values = {20};
    g.variants = {Variant::rank_r_fnn};
    g.repeats = 3;
    g.train.epochs = 150;
    g.train.adam.learning_rate = 0.05;
    const GridResult r = run_grid(g, images, 1);
    EXPECT_GE(r.cells[0].overall.mean, 0.99);
}

TEST(SummaryTable, HasOneLinePerCell) {
    CellSummary s;
    s.tws = 9;
    s.ts = 50;
    s.overall = {10, 0.9, 0.01, 0.89, 0.91};
    const std::vector<CellSummary> cells{s, s};
    const std::string table = format_summary_table(cells);
    EXPECT_EQ(std::count(table.begin(), table.end(), '\n'), 3);
    EXPECT_NE(table.find("0.9000 +- 0.0100"), std::string::npos);
}
