// rrfnn: generate scenes, train and evaluate Rank-R / dense FNNs, run the
// TWS x TS grid, render prediction maps and check gradients.
//
// Exit codes: 0 success, 1 usage, 2 data error, 3 diverged, 4 gradient check
// above tolerance.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rrfnn/config.hpp"
#include "rrfnn/cube_io.hpp"
#include "rrfnn/errors.hpp"
#include "rrfnn/evaluate.hpp"
#include "rrfnn/experiment.hpp"
#include "rrfnn/gradcheck.hpp"
#include "rrfnn/model_io.hpp"
#include "rrfnn/render.hpp"
#include "rrfnn/synth.hpp"

namespace fs = std::filesystem;
using namespace rrfnn;

namespace {

enum Exit { kOk = 0, kUsage = 1, kData = 2, kDiverged = 3, kGradcheck = 4 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Globals {
    std::optional<std::uint64_t> seed;
    std::string config;
    std::size_t threads = 1;
    std::string out_dir = ".";
    std::vector<std::string> overrides;
    bool quiet = false;
};

struct DataArgs {
    std::string cube;
    std::string labels;
};

void add_data_options(CLI::App* cmd, DataArgs& d) {
    cmd->add_option("--cube", d.cube, "HSCUBE1 input (a scene is generated from the config if omitted)");
    cmd->add_option("--labels", d.labels, "HSLBL1 ground truth for --cube");
}

template <class F>
void as_usage(F&& f) {
    try {
        f();
    } catch (const InvalidArgument& e) {
        throw UsageError(e.what());
    }
}

Settings load_settings(const Globals& g, bool seed_is_scene_seed = false) {
    Settings s;
    as_usage([&] {
        if (!g.config.empty()) apply_config_file(s, g.config);
        for (const auto& kv : g.overrides) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) throw InvalidArgument("--set expects key=value, got '" + kv + "'");
            set_config_value(s, kv.substr(0, eq), kv.substr(eq + 1));
        }
        if (g.seed) set_config_value(s, seed_is_scene_seed ? "scene_seed" : "seed", std::to_string(*g.seed));
    });
    return s;
}

fs::path out_path(const Globals& g, const std::string& explicit_path, const std::string& fallback) {
    fs::path p = explicit_path.empty() ? fs::path(g.out_dir) / fallback : fs::path(explicit_path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    return p;
}

std::shared_ptr<const LabeledImage> load_image(const DataArgs& d, const Settings& s, bool need_labels) {
    if (d.cube.empty()) {
        if (!d.labels.empty()) throw UsageError("--labels given without --cube");
        Scene scene = generate_scene(s.scene);
        return std::make_shared<LabeledImage>(LabeledImage{normalize_bandwise(scene.cube), std::move(scene.labels)});
    }
    HyperCube cube = load_cube(d.cube);
    LabelMap labels;
    if (!d.labels.empty()) {
        labels = load_labels(d.labels);
    } else if (need_labels) {
        throw UsageError("--labels is required with --cube");
    } else {
        labels = LabelMap(cube.height(), cube.width(), std::vector<std::uint8_t>(cube.height() * cube.width(), 0));
    }
    return std::make_shared<LabeledImage>(LabeledImage{normalize_bandwise(cube), std::move(labels)});
}

void print_evaluation(const Evaluation& e) {
    std::printf("overall accuracy %.4f on %zu samples\n", e.overall_accuracy, e.total);
    for (std::size_t c = 0; c < e.per_class_accuracy.size(); ++c) {
        std::printf("  class %zu: %.4f (%zu samples)\n", c, e.per_class_accuracy[c], e.class_totals[c]);
    }
    std::printf("confusion (rows true, columns predicted):\n");
    for (const auto& row : e.confusion) {
        for (std::size_t v : row) std::printf(" %7zu", v);
        std::printf("\n");
    }
}

void write_evaluation_csv(const Evaluation& e, const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << "class,total,accuracy";
    for (std::size_t c = 0; c < e.confusion.size(); ++c) out << ",pred_" << c;
    out << '\n';
    for (std::size_t c = 0; c < e.confusion.size(); ++c) {
        out << c << ',' << e.class_totals[c] << ',' << e.per_class_accuracy[c];
        for (std::size_t v : e.confusion[c]) out << ',' << v;
        out << '\n';
    }
}

CubeDtype parse_dtype(const std::string& name) {
    if (name == "f32") return CubeDtype::float32;
    if (name == "f64") return CubeDtype::float64;
    throw UsageError("--dtype must be f32 or f64");
}

// generate ------------------------------------------------------------------

struct GenerateArgs {
    std::string cube, labels, truth, dtype = "f64";
};

int cmd_generate(const Globals& g, const GenerateArgs& a) {
    const Settings s = load_settings(g, true);
    as_usage([&] { s.scene.validate(); });
    const Scene scene = generate_scene(s.scene);
    const fs::path cube_path = out_path(g, a.cube, "scene.hscube");
    const fs::path label_path = out_path(g, a.labels, "scene.hslbl");
    save_cube(scene.cube, cube_path, parse_dtype(a.dtype));
    save_labels(scene.labels, label_path);
    if (!a.truth.empty()) {
        write_ppm(scene.labels.values(), scene.labels.height(), scene.labels.width(), out_path(g, a.truth, ""));
    }
    if (!g.quiet) {
        const HyperCube normalized = normalize_bandwise(scene.cube);
        const auto counts = scene.labels.class_counts(s.scene.classes);
        std::printf("wrote %s and %s (%zux%zux%zu)\n", cube_path.c_str(), label_path.c_str(), scene.cube.height(),
                    scene.cube.width(), scene.cube.bands());
        std::printf("class counts:");
        for (std::size_t c : counts) std::printf(" %zu", c);
        std::printf("\nscene difficulty %.4f\n", scene_difficulty(normalized, scene.labels, s.scene.seed));
    }
    return kOk;
}

// convert -------------------------------------------------------------------

struct ConvertArgs {
    std::string input, input_labels, cube, labels, dtype = "f64";
    std::size_t height = 0, width = 0, bands = 0;
};

int cmd_convert(const Globals& g, const ConvertArgs& a) {
    const HyperCube cube = load_raw_bsq_float32(a.input, a.height, a.width, a.bands);
    const fs::path cube_path = out_path(g, a.cube, fs::path(a.input).stem().string() + ".hscube");
    save_cube(cube, cube_path, parse_dtype(a.dtype));
    if (!g.quiet) std::printf("wrote %s\n", cube_path.c_str());
    if (!a.input_labels.empty()) {
        const LabelMap labels = load_raw_labels_u8(a.input_labels, a.height, a.width);
        const fs::path label_path = out_path(g, a.labels, fs::path(a.input_labels).stem().string() + ".hslbl");
        save_labels(labels, label_path);
        if (!g.quiet) std::printf("wrote %s\n", label_path.c_str());
    }
    return kOk;
}

// train ---------------------------------------------------------------------

struct TrainArgs {
    DataArgs data;
    std::string variant = "rank_r_fnn";
    std::size_t tws = 9, ts = 50, repeat = 0;
    std::optional<std::size_t> epochs, batch_size, hidden, rank;
    std::optional<double> learning_rate;
    std::string model, loss_csv;
};

int cmd_train(const Globals& g, const TrainArgs& a) {
    Settings s = load_settings(g);
    Variant variant{};
    as_usage([&] {
        variant = parse_variant(a.variant);
        if (a.tws % 2 == 0) throw InvalidArgument("--tws must be odd, got " + std::to_string(a.tws));
        if (a.epochs) s.grid.train.epochs = *a.epochs;
        if (a.batch_size) s.grid.train.batch_size = *a.batch_size;
        if (a.learning_rate) s.grid.train.adam.learning_rate = *a.learning_rate;
        if (a.hidden) s.grid.model.hidden = *a.hidden;
        if (a.rank) s.grid.model.rank = *a.rank;
        s.grid.tws_values = {a.tws};
        s.grid.ts_values = {a.ts};
        s.grid.train.validate();
        NetworkShape probe = s.grid.model;
        probe.side = a.tws;
        probe.validate(variant == Variant::rank_r_fnn);
    });

    const auto image = load_image(a.data, s, true);
    const SamplePool pool = build_sample_pool({image}, a.tws, s.grid.model.classes);
    const FittedRun fitted = fit_run(s.grid, pool, a.ts, variant, a.repeat, [&](std::size_t epoch, double loss) {
        if (!g.quiet && (epoch % 10 == 0 || epoch + 1 == s.grid.train.epochs)) {
            std::printf("epoch %4zu  loss %.6f\n", epoch + 1, loss);
        }
    });
    const RunResult& r = fitted.result;

    const char* ext = variant == Variant::rank_r_fnn ? "model.rrfnn" : "model.dnfnn";
    const fs::path model_path = out_path(g, a.model, ext);
    std::visit([&](const auto& m) { save_model(m, model_path); }, fitted.model);

    if (!a.loss_csv.empty()) {
        std::ofstream out(out_path(g, a.loss_csv, ""));
        out << "epoch,loss\n";
        for (std::size_t e = 0; e < r.loss_history.size(); ++e) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.17g", r.loss_history[e]);
            out << e + 1 << ',' << buf << '\n';
        }
    }
    if (!g.quiet) {
        std::printf("%s TWS=%zu TS=%zu repeat %zu: %zu train, %zu test samples, %.0f ms\n",
                    std::string(to_string(variant)).c_str(), a.tws, a.ts, a.repeat, r.train_size, r.test_size,
                    r.wall_ms);
        if (r.test_size > 0) print_evaluation(r.evaluation);
        std::printf("saved %s\n", model_path.c_str());
    }
    return kOk;
}

// evaluate ------------------------------------------------------------------

struct EvaluateArgs {
    DataArgs data;
    std::string model, csv;
    std::optional<std::size_t> ts;
    std::size_t repeat = 0;
};

int cmd_evaluate(const Globals& g, const EvaluateArgs& a) {
    const Settings s = load_settings(g);
    const AnyModel model = load_model(a.model);
    const NetworkShape shape = std::visit([](const auto& m) { return m.shape(); }, model);
    const auto image = load_image(a.data, s, true);
    const SamplePool pool = build_sample_pool({image}, shape.side, shape.classes);

    std::vector<std::size_t> indices;
    if (a.ts) {
        indices = split_train_test(pool, {*a.ts, split_seed(s.grid.base_seed, shape.side, *a.ts), a.repeat},
                                   shape.classes)
                      .test;
    } else {
        indices.resize(pool.size());
        for (std::size_t i = 0; i < indices.size(); ++i) indices[i] = i;
    }
    const PoolSubset test(pool, std::move(indices));
    const Evaluation e = std::visit([&](const auto& m) { return evaluate(m, test); }, model);
    print_evaluation(e);
    if (!a.csv.empty()) write_evaluation_csv(e, out_path(g, a.csv, ""));
    return kOk;
}

// grid ----------------------------------------------------------------------

struct GridArgs {
    DataArgs data;
    std::string runs = "runs.csv", summary = "summary.csv";
};

int cmd_grid(const Globals& g, const GridArgs& a) {
    const Settings s = load_settings(g);
    as_usage([&] { s.grid.validate(); });
    if (g.threads == 0) throw UsageError("--threads must be at least 1");
    const auto image = load_image(a.data, s, true);

    const GridResult result = run_grid(s.grid, {image}, g.threads, [&](const RunResult& r, std::size_t done,
                                                                       std::size_t total) {
        if (!g.quiet) {
            std::fprintf(stderr, "[%zu/%zu] %s TWS=%zu TS=%zu repeat %zu: %.4f (%.0f ms)\n", done, total,
                         std::string(to_string(r.variant)).c_str(), r.tws, r.ts, r.repeat,
                         r.evaluation.overall_accuracy, r.wall_ms);
        }
    });
    for (const auto& w : result.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());

    const std::size_t classes = s.grid.model.classes;
    {
        const fs::path p = out_path(g, "", a.runs);
        std::ofstream out(p);
        if (!out) throw IoError("cannot open " + p.string() + " for writing");
        write_runs_csv(out, result.runs, classes);
    }
    {
        const fs::path p = out_path(g, "", a.summary);
        std::ofstream out(p);
        if (!out) throw IoError("cannot open " + p.string() + " for writing");
        write_summary_csv(out, result.cells, classes);
    }
    {
        std::ofstream out(out_path(g, "", "config.txt"));
        out << to_config_text(s);
    }
    if (!g.quiet) std::cout << format_summary_table(result.cells);
    return kOk;
}

// render --------------------------------------------------------------------

struct RenderArgs {
    DataArgs data;
    std::string model, out, truth;
};

int cmd_render(const Globals& g, const RenderArgs& a) {
    const Settings s = load_settings(g);
    const AnyModel model = load_model(a.model);
    const std::size_t side = std::visit([](const auto& m) { return m.shape().side; }, model);
    const auto image = load_image(a.data, s, false);
    const auto& cube = image->cube;
    const auto map = std::visit([&](const auto& m) { return prediction_map(m, cube, image->labels); }, model);
    const fs::path p = out_path(g, a.out, "prediction.ppm");
    write_ppm(map, cube.height(), cube.width(), p);
    if (!a.truth.empty()) {
        write_ppm(interior_labels(image->labels, side), cube.height(), cube.width(), out_path(g, a.truth, ""));
    }
    if (!g.quiet) std::printf("wrote %s (%zux%zu)\n", p.c_str(), cube.width(), cube.height());
    return kOk;
}

// gradcheck -----------------------------------------------------------------

struct GradcheckArgs {
    std::size_t instances = 20;
    double tolerance = 1e-4;
    double h = 1e-5;
};

int cmd_gradcheck(const Globals& g, const GradcheckArgs& a) {
    load_settings(g);
    GradCheckSuite suite;
    suite.instances = a.instances;
    suite.h = a.h;
    suite.seed = g.seed.value_or(0);
    const GradCheckSuiteReport r = run_gradcheck_suite(suite);
    std::printf("rank_r_fnn: %zu parameters checked, max relative error %.3e\n", r.rank_r.parameters,
                r.rank_r.max_relative_error);
    std::printf("dense_fnn:  %zu parameters checked, max relative error %.3e\n", r.dense.parameters,
                r.dense.max_relative_error);
    std::printf("max relative error %.3e (tolerance %.1e)\n", r.max_relative_error(), a.tolerance);
    return r.max_relative_error() < a.tolerance ? kOk : kGradcheck;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Rank-R feed-forward tensor networks for hyperspectral pixel classification"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "rrfnn 0.1.0");

    Globals g;
    app.add_option("--seed", g.seed, "base seed (scene seed for generate)");
    app.add_option("--config", g.config, "key = value config file")->check(CLI::ExistingFile);
    app.add_option("--threads", g.threads, "concurrent runs for grid");
    app.add_option("--out-dir", g.out_dir, "directory for default output paths");
    app.add_option("--set", g.overrides, "override one config key, key=value (repeatable)");
    app.add_flag("-q,--quiet", g.quiet, "suppress progress output");

    std::string key_help = "config keys:\n";
    for (const auto& k : config_keys()) key_help += "  " + k.name + ": " + k.help + "\n";
    app.footer(key_help);

    int code = kOk;

    GenerateArgs gen;
    auto* generate = app.add_subcommand("generate", "write a synthetic scene as HSCUBE1 + HSLBL1");
    generate->add_option("--cube", gen.cube, "cube output (default <out-dir>/scene.hscube)");
    generate->add_option("--labels", gen.labels, "label output (default <out-dir>/scene.hslbl)");
    generate->add_option("--truth", gen.truth, "also render the ground truth to this PPM");
    generate->add_option("--dtype", gen.dtype, "f32 or f64")->check(CLI::IsMember({"f32", "f64"}));
    generate->callback([&] { code = cmd_generate(g, gen); });

    ConvertArgs conv;
    auto* convert = app.add_subcommand("convert", "convert a headerless float32 BSQ cube to HSCUBE1");
    convert->add_option("--input", conv.input, "raw float32 band-sequential file")->required();
    convert->add_option("--height", conv.height)->required();
    convert->add_option("--width", conv.width)->required();
    convert->add_option("--bands", conv.bands)->required();
    convert->add_option("--input-labels", conv.input_labels, "raw uint8 row-major labels");
    convert->add_option("--cube", conv.cube, "cube output");
    convert->add_option("--labels", conv.labels, "label output");
    convert->add_option("--dtype", conv.dtype, "f32 or f64")->check(CLI::IsMember({"f32", "f64"}));
    convert->callback([&] { code = cmd_convert(g, conv); });

    TrainArgs tr;
    auto* train = app.add_subcommand("train", "train one model on one split");
    add_data_options(train, tr.data);
    train->add_option("--variant", tr.variant, "rank_r_fnn or dense_fnn");
    train->add_option("--tws", tr.tws, "patch side");
    train->add_option("--ts", tr.ts, "training samples per class");
    train->add_option("--repeat", tr.repeat, "split repeat index");
    train->add_option("--epochs", tr.epochs);
    train->add_option("--batch-size", tr.batch_size);
    train->add_option("--learning-rate", tr.learning_rate);
    train->add_option("--hidden", tr.hidden, "hidden neurons Q");
    train->add_option("--rank", tr.rank, "CP rank R");
    train->add_option("--model", tr.model, "model output (default <out-dir>/model.rrfnn or model.dnfnn)");
    train->add_option("--loss-csv", tr.loss_csv, "write the per-epoch loss here");
    train->callback([&] { code = cmd_train(g, tr); });

    EvaluateArgs ev;
    auto* evaluate_cmd = app.add_subcommand("evaluate", "score a saved model");
    add_data_options(evaluate_cmd, ev.data);
    evaluate_cmd->add_option("--model", ev.model)->required()->check(CLI::ExistingFile);
    evaluate_cmd->add_option("--ts", ev.ts, "score only the test set of this split (same --seed as train)");
    evaluate_cmd->add_option("--repeat", ev.repeat, "split repeat index");
    evaluate_cmd->add_option("--csv", ev.csv, "write per-class results and confusion matrix");
    evaluate_cmd->callback([&] { code = cmd_evaluate(g, ev); });

    GridArgs gr;
    auto* grid = app.add_subcommand("grid", "run the TWS x TS x variant x repeat grid");
    add_data_options(grid, gr.data);
    grid->add_option("--runs", gr.runs, "per-run CSV name inside --out-dir");
    grid->add_option("--summary", gr.summary, "per-cell CSV name inside --out-dir");
    grid->callback([&] { code = cmd_grid(g, gr); });

    RenderArgs rd;
    auto* render = app.add_subcommand("render", "render a prediction map as PPM");
    add_data_options(render, rd.data);
    render->add_option("--model", rd.model)->required()->check(CLI::ExistingFile);
    render->add_option("--out", rd.out, "output PPM (default <out-dir>/prediction.ppm)");
    render->add_option("--truth", rd.truth, "also render the ground truth over the same interior");
    render->callback([&] { code = cmd_render(g, rd); });

    GradcheckArgs gc;
    auto* gradcheck = app.add_subcommand("gradcheck", "finite-difference check of both models' gradients");
    gradcheck->add_option("--instances", gc.instances);
    gradcheck->add_option("--tolerance", gc.tolerance);
    gradcheck->add_option("--step", gc.h, "finite-difference step h");
    gradcheck->callback([&] { code = cmd_gradcheck(g, gc); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kUsage;
    } catch (const UsageError& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return kUsage;
    } catch (const DivergedError& e) {
        std::fprintf(stderr, "diverged: %s\n", e.what());
        return kDiverged;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kData;
    }
    return code;
}
