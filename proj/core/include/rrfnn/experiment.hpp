#pragma once

// Repeated hold-out experiments over a TWS x TS grid.
//
// Every run is a pure function of its grid position. For a cell (tws, ts) and
// repeat r:
//
//   split seed = derive_seed({base_seed, tws, ts})        (repeat_index = r)
//   run seed   = derive_seed({base_seed, tws, ts, variant id, r})
//
// The split does not depend on the variant, so Rank-R and dense runs with
// the same (tws, ts, r) see identical train and test sets. The run seed
// drives parameter initialization and the per-epoch shuffle.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "rrfnn/evaluate.hpp"
#include "rrfnn/model.hpp"
#include "rrfnn/model_io.hpp"
#include "rrfnn/optim.hpp"
#include "rrfnn/sampling.hpp"
#include "rrfnn/stats.hpp"

namespace rrfnn {

enum class Variant : std::uint32_t { rank_r_fnn = 0, dense_fnn = 1 };

std::string_view to_string(Variant variant);
/// Accepts "rank_r_fnn" or "dense_fnn"; throws InvalidArgument otherwise.
Variant parse_variant(std::string_view name);

struct ExperimentGrid {
    std::vector<std::size_t> tws_values{9, 15, 21};
    std::vector<std::size_t> ts_values{50, 100, 200, 400};
    std::size_t repeats = 10;
    std::vector<Variant> variants{Variant::rank_r_fnn, Variant::dense_fnn};
    /// Q, R, C, activation and bias; side and bands are set per cell.
    NetworkShape model;
    double init_scale = 1.0;
    TrainConfig train;
    std::uint64_t base_seed = 0;
    double confidence = 0.95;

    /// Throws InvalidArgument for even or empty TWS lists, repeats < 2 and the
    /// like.
    void validate() const;
    std::size_t run_count() const { return tws_values.size() * ts_values.size() * variants.size() * repeats; }
};

std::uint64_t split_seed(std::uint64_t base_seed, std::size_t tws, std::size_t ts);
std::uint64_t run_seed(std::uint64_t base_seed, std::size_t tws, std::size_t ts, Variant variant, std::size_t repeat);

struct RunResult {
    Variant variant = Variant::rank_r_fnn;
    std::size_t tws = 0;
    std::size_t ts = 0;
    std::size_t repeat = 0;
    std::uint64_t seed = 0;
    std::size_t train_size = 0;
    std::size_t test_size = 0;
    /// Empty confusion matrix and NaN accuracies when the test set is empty.
    Evaluation evaluation;
    std::vector<double> loss_history;
    double wall_ms = 0.0;
};

struct CellSummary {
    Variant variant = Variant::rank_r_fnn;
    std::size_t tws = 0;
    std::size_t ts = 0;
    Summary overall;
    std::vector<Summary> per_class;
    Summary loss_final;
};

struct FittedRun {
    RunResult result;
    AnyModel model;
};

/// Split, initialize, train and evaluate one repeat, keeping the model. The
/// pool's side is the TWS of the cell. Throws InsufficientSamples with the cell named in the message.
FittedRun fit_run(const ExperimentGrid& grid, const SamplePool& pool, std::size_t ts, Variant variant,
                  std::size_t repeat, const EpochCallback& on_epoch = {});
RunResult run_single(const ExperimentGrid& grid, const SamplePool& pool, std::size_t ts, Variant variant,
                     std::size_t repeat);

/// All repeats of one cell, sequentially.
std::vector<RunResult> run_cell(const ExperimentGrid& grid, const SamplePool& pool, std::size_t ts, Variant variant);

CellSummary summarize(std::span<const RunResult> runs, std::size_t classes, double confidence = 0.95);

struct GridResult {
    /// Ordered by tws, then ts, then variant, then repeat.
    std::vector<RunResult> runs;
    /// One per (tws, ts, variant), same order.
    std::vector<CellSummary> cells;
    std::vector<std::string> warnings;
};

/// Called once per finished run, from worker threads, serialized.
using RunCallback = std::function<void(const RunResult&, std::size_t done, std::size_t total)>;

/// Runs the whole grid on up to `threads` workers. Results do not depend on
/// the thread count. The first failing run's exception is rethrown after the
/// remaining workers stop.
GridResult run_grid(const ExperimentGrid& grid, const std::vector<std::shared_ptr<const LabeledImage>>& images,
                    std::size_t threads = 1, const RunCallback& on_run = {});

/// variant,tws,ts,repeat,seed,overall_acc,acc_class_0..C-1,loss_final,wall_ms
void write_runs_csv(std::ostream& out, std::span<const RunResult> runs, std::size_t classes);
/// variant,tws,ts,n,mean_acc,std_acc,ci_low,ci_high, then the same four
/// columns per class, then mean_loss_final.
void write_summary_csv(std::ostream& out, std::span<const CellSummary> cells, std::size_t classes);
/// Human-readable table of mean +- std and CI per cell.
std::string format_summary_table(std::span<const CellSummary> cells);

}  // namespace rrfnn
