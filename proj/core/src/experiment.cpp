#include "rrfnn/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "rrfnn/errors.hpp"
#include "rrfnn/random.hpp"

namespace rrfnn {

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

Evaluation empty_evaluation(std::size_t classes) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    Evaluation e;
    e.class_totals.assign(classes, 0);
    e.per_class_accuracy.assign(classes, nan);
    e.overall_accuracy = nan;
    return e;
}

template <class Model>
void fit_and_score(Model& model, const ExperimentGrid& grid, const PoolSubset& train_set,
                   const PoolSubset& test_set, std::uint64_t seed, RunResult& result, const EpochCallback& on_epoch) {
    initialize(model, seed, grid.init_scale);
    TrainConfig config = grid.train;
    config.seed = seed;
    result.loss_history = train(model, train_set, config, on_epoch).loss_history;
    result.evaluation =
        test_set.size() > 0 ? evaluate(model, test_set) : empty_evaluation(model.shape().classes);
}

std::string cell_name(std::size_t tws, std::size_t ts) {
    return "TWS=" + std::to_string(tws) + ", TS=" + std::to_string(ts);
}

}  // namespace

std::string_view to_string(Variant variant) {
    switch (variant) {
        case Variant::rank_r_fnn: return "rank_r_fnn";
        case Variant::dense_fnn: return "dense_fnn";
    }
    return "unknown";
}

Variant parse_variant(std::string_view name) {
    if (name == "rank_r_fnn") return Variant::rank_r_fnn;
    if (name == "dense_fnn") return Variant::dense_fnn;
    throw InvalidArgument("unknown variant '" + std::string(name) + "' (expected rank_r_fnn or dense_fnn)");
}

void ExperimentGrid::validate() const {
    if (tws_values.empty()) throw InvalidArgument("grid needs at least one TWS value");
    if (ts_values.empty()) throw InvalidArgument("grid needs at least one TS value");
    if (variants.empty()) throw InvalidArgument("grid needs at least one variant");
    for (std::size_t tws : tws_values) {
        if (tws % 2 == 0) throw InvalidArgument("TWS values must be odd, got " + std::to_string(tws));
    }
    for (std::size_t ts : ts_values) {
        if (ts == 0) throw InvalidArgument("TS values must be positive");
    }
    if (repeats < 2) throw InvalidArgument("repeats must be at least 2, got " + std::to_string(repeats));
    if (!(init_scale > 0.0) || !std::isfinite(init_scale)) throw InvalidArgument("init scale must be positive");
    if (!(confidence > 0.0 && confidence < 1.0)) throw InvalidArgument("confidence must lie in (0, 1)");
    NetworkShape probe = model;
    probe.side = tws_values.front();
    probe.validate(true);
    train.validate();
}

std::uint64_t split_seed(std::uint64_t base_seed, std::size_t tws, std::size_t ts) {
    return derive_seed({base_seed, tws, ts});
}

std::uint64_t run_seed(std::uint64_t base_seed, std::size_t tws, std::size_t ts, Variant variant,
                       std::size_t repeat) {
    return derive_seed({base_seed, tws, ts, static_cast<std::uint64_t>(variant), repeat});
}

FittedRun fit_run(const ExperimentGrid& grid, const SamplePool& pool, std::size_t ts, Variant variant,
                  std::size_t repeat, const EpochCallback& on_epoch) {
    const auto start = std::chrono::steady_clock::now();
    const std::size_t tws = pool.side();

    RunResult result;
    result.variant = variant;
    result.tws = tws;
    result.ts = ts;
    result.repeat = repeat;
    result.seed = run_seed(grid.base_seed, tws, ts, variant, repeat);

    Split split;
    try {
        split = split_train_test(pool, {ts, split_seed(grid.base_seed, tws, ts), repeat}, pool.classes());
    } catch (const InsufficientSamples& e) {
        throw InsufficientSamples(cell_name(tws, ts) + ": " + e.what());
    }
    result.train_size = split.train.size();
    result.test_size = split.test.size();
    const PoolSubset train_set(pool, std::move(split.train));
    const PoolSubset test_set(pool, std::move(split.test));

    NetworkShape shape = grid.model;
    shape.side = tws;
    shape.bands = pool.dims().bands;
    shape.classes = pool.classes();
    FittedRun fitted = [&]() -> FittedRun {
        if (variant == Variant::rank_r_fnn) {
            RankRFNN model(shape);
            fit_and_score(model, grid, train_set, test_set, result.seed, result, on_epoch);
            return {std::move(result), std::move(model)};
        }
        DenseFNN model(shape);
        fit_and_score(model, grid, train_set, test_set, result.seed, result, on_epoch);
        return {std::move(result), std::move(model)};
    }();
    fitted.result.wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return fitted;
}

RunResult run_single(const ExperimentGrid& grid, const SamplePool& pool, std::size_t ts, Variant variant,
                     std::size_t repeat) {
    return fit_run(grid, pool, ts, variant, repeat).result;
}

std::vector<RunResult> run_cell(const ExperimentGrid& grid, const SamplePool& pool, std::size_t ts,
                                Variant variant) {
    std::vector<RunResult> runs;
    runs.reserve(grid.repeats);
    for (std::size_t r = 0; r < grid.repeats; ++r) runs.push_back(run_single(grid, pool, ts, variant, r));
    return runs;
}

CellSummary summarize(std::span<const RunResult> runs, std::size_t classes, double confidence) {
    if (runs.empty()) throw InvalidArgument("no runs to summarize");
    CellSummary cell;
    cell.variant = runs.front().variant;
    cell.tws = runs.front().tws;
    cell.ts = runs.front().ts;

    std::vector<double> values(runs.size());
    for (std::size_t n = 0; n < runs.size(); ++n) values[n] = runs[n].evaluation.overall_accuracy;
    cell.overall = aggregate(values, confidence);
    for (std::size_t c = 0; c < classes; ++c) {
        for (std::size_t n = 0; n < runs.size(); ++n) values[n] = runs[n].evaluation.per_class_accuracy.at(c);
        cell.per_class.push_back(aggregate(values, confidence));
    }
    for (std::size_t n = 0; n < runs.size(); ++n) {
        const auto& h = runs[n].loss_history;
        values[n] = h.empty() ? std::numeric_limits<double>::quiet_NaN() : h.back();
    }
    cell.loss_final = aggregate(values, confidence);
    return cell;
}

GridResult run_grid(const ExperimentGrid& grid, const std::vector<std::shared_ptr<const LabeledImage>>& images,
                    std::size_t threads, const RunCallback& on_run) {
    grid.validate();
    if (images.empty()) throw InvalidArgument("grid needs at least one image");
    const std::size_t classes = grid.model.classes;

    std::vector<SamplePool> pools;
    pools.reserve(grid.tws_values.size());
    for (std::size_t tws : grid.tws_values) pools.push_back(build_sample_pool(images, tws, classes));

    struct Job {
        std::size_t pool;
        std::size_t ts;
        Variant variant;
        std::size_t repeat;
    };
    std::vector<Job> jobs;
    for (std::size_t t = 0; t < grid.tws_values.size(); ++t) {
        for (std::size_t ts : grid.ts_values) {
            for (Variant v : grid.variants) {
                for (std::size_t r = 0; r < grid.repeats; ++r) jobs.push_back({t, ts, v, r});
            }
        }
    }

    GridResult result;
    result.runs.resize(jobs.size());
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex mutex;
    std::size_t done = 0;

    auto worker = [&] {
        for (;;) {
            const std::size_t n = next.fetch_add(1);
            if (n >= jobs.size() || failed.load()) return;
            const Job& job = jobs[n];
            try {
                RunResult run = run_single(grid, pools[job.pool], job.ts, job.variant, job.repeat);
                std::lock_guard lock(mutex);
                result.runs[n] = std::move(run);
                ++done;
                if (on_run) on_run(result.runs[n], done, jobs.size());
            } catch (...) {
                std::lock_guard lock(mutex);
                if (!error) error = std::current_exception();
                failed.store(true);
                return;
            }
        }
    };

    const std::size_t workers = std::clamp<std::size_t>(threads, 1, jobs.size());
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    }
    if (error) std::rethrow_exception(error);

    for (std::size_t start = 0; start < result.runs.size(); start += grid.repeats) {
        const std::span<const RunResult> cell(result.runs.data() + start, grid.repeats);
        if (cell.front().test_size == 0) {
            result.warnings.push_back(std::string(to_string(cell.front().variant)) + " " +
                                      cell_name(cell.front().tws, cell.front().ts) +
                                      ": test set is empty, accuracies are undefined");
        }
        result.cells.push_back(summarize(cell, classes, grid.confidence));
    }
    return result;
}

void write_runs_csv(std::ostream& out, std::span<const RunResult> runs, std::size_t classes) {
    out << "variant,tws,ts,repeat,seed,overall_acc";
    for (std::size_t c = 0; c < classes; ++c) out << ",acc_class_" << c;
    out << ",loss_final,wall_ms\n";
    for (const RunResult& r : runs) {
        out << to_string(r.variant) << ',' << r.tws << ',' << r.ts << ',' << r.repeat << ',' << r.seed << ','
            << fmt(r.evaluation.overall_accuracy);
        for (std::size_t c = 0; c < classes; ++c) out << ',' << fmt(r.evaluation.per_class_accuracy.at(c));
        out << ',' << fmt(r.loss_history.empty() ? std::numeric_limits<double>::quiet_NaN() : r.loss_history.back())
            << ',' << fmt(r.wall_ms) << '\n';
    }
}

void write_summary_csv(std::ostream& out, std::span<const CellSummary> cells, std::size_t classes) {
    out << "variant,tws,ts,n,mean_acc,std_acc,ci_low,ci_high";
    for (std::size_t c = 0; c < classes; ++c) {
        out << ",mean_class_" << c << ",std_class_" << c << ",ci_low_class_" << c << ",ci_high_class_" << c;
    }
    out << ",mean_loss_final\n";
    for (const CellSummary& s : cells) {
        out << to_string(s.variant) << ',' << s.tws << ',' << s.ts << ',' << s.overall.n << ',' << fmt(s.overall.mean)
            << ',' << fmt(s.overall.std) << ',' << fmt(s.overall.ci_low) << ',' << fmt(s.overall.ci_high);
        for (std::size_t c = 0; c < classes; ++c) {
            const Summary& p = s.per_class.at(c);
            out << ',' << fmt(p.mean) << ',' << fmt(p.std) << ',' << fmt(p.ci_low) << ',' << fmt(p.ci_high);
        }
        out << ',' << fmt(s.loss_final.mean) << '\n';
    }
}

std::string format_summary_table(std::span<const CellSummary> cells) {
    std::ostringstream out;
    char line[160];
    std::snprintf(line, sizeof line, "%-11s %4s %4s  %-17s %-19s\n", "variant", "tws", "ts", "accuracy", "95% CI");
    out << line;
    for (const CellSummary& s : cells) {
        std::snprintf(line, sizeof line, "%-11s %4zu %4zu  %.4f +- %.4f   (%.4f, %.4f)\n",
                      std::string(to_string(s.variant)).c_str(), s.tws, s.ts, s.overall.mean, s.overall.std,
                      s.overall.ci_low, s.overall.ci_high);
        out << line;
    }
    return out.str();
}

}  // namespace rrfnn
