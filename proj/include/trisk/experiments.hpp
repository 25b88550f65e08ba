// Seeded experiment harness: repeated source-selection trials for the
// prediction and portfolio pipelines, plus the correlation summaries.
//
// Determinism contract: every trial draws from its own counter-based stream
// keyed by (seed, trial_index), rows are emitted in trial order, and the
// output files are byte-identical for a given (config, data) regardless of
// how many worker threads run the trials. The TRANSFER_RISK_THREADS
// environment variable caps the worker count (0 or unset = hardware
// concurrency).
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "trisk/data.hpp"
#include "trisk/ridge.hpp"
#include "trisk/stats.hpp"

namespace trisk {

enum class ExperimentKind { prediction, portfolio };

struct PredictionParams {
    std::size_t lag = 5;
    std::size_t order = 2;
    double lambda_source = 1.0;
    double lambda_target = 5.0;
};

struct PortfolioParams {
    double lambda = 0.2;
};

// Built-in generator: Gaussian source families at graded W2 distance from a
// fixed target task, replacing the data directory.
struct SyntheticSuite {
    std::size_t dim = 3;        // inputs (prediction) or assets (portfolio)
    std::size_t samples = 4000; // generated observations per trial and side
};

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::prediction;
    std::string label = "target";
    std::size_t trials = 1;
    std::uint64_t seed = 0;
    std::vector<std::string> source_universe;
    std::vector<std::string> target_universe;
    std::size_t sources_per_trial = 10;
    std::size_t targets_per_trial = 1;
    std::int64_t train_end = 0;
    std::int64_t test_end = 0;
    Frequency source_frequency = Frequency::d1;
    Frequency target_frequency = Frequency::d1;
    bool include_overnight = true;
    PredictionParams prediction;
    PortfolioParams portfolio;
    std::optional<SyntheticSuite> synthetic;
    std::string data_dir;
    std::string output_dir = ".";
};

struct TrialRow {
    std::size_t trial_index = 0;
    std::vector<std::string> source_symbols;
    std::vector<std::string> target_symbols;
    bool failed = false;
    std::string error;

    double transfer_risk = 0.0;
    // prediction
    MetricsReport direct;
    MetricsReport transfer;
    double regret = 0.0;           // synthetic suite only
    // portfolio
    double r1 = 0.0;
    double r2 = 0.0;
    double direct_sharpe = 0.0;
    double transfer_sharpe = 0.0;
};

struct SummaryTable {
    std::vector<std::string> labels;
    std::vector<std::vector<double>> matrix;   // prediction: 4x4 Pearson matrix
    double risk_sharpe_correlation = 0.0;      // portfolio
    std::size_t used_rows = 0;
    std::size_t failed_rows = 0;
};

// Signature-feature rows of one bar series, split at the timestamp of the
// predicted return (half-open at train_end, bounded by test_end).
struct PredictionSplit {
    Matrix train_x;
    Vector train_y;
    Matrix test_x;
    Vector test_y;
    std::vector<std::int64_t> test_timestamps;
};

PredictionSplit build_prediction_split(const BarSeries& bars, const PredictionParams& params,
                                       std::int64_t train_end, std::int64_t test_end);

ExperimentConfig load_experiment_config(const std::string& path);

// Runs every trial; failures are recorded per row, never dropped.
// Throws DataMissing when a referenced symbol has no data file.
std::vector<TrialRow> run_trials(const ExperimentConfig& config, const std::string& data_root);

// Pairwise Pearson matrix over {MSE, -R2, -Corr, risk} for prediction rows,
// or the (risk, Sharpe) correlation for portfolio rows. Throws TooFewRows.
SummaryTable summarize(const std::vector<TrialRow>& rows, const ExperimentConfig& config);

// Writes trials.csv, summary.csv and summary.json into config.output_dir.
void write_experiment_outputs(const ExperimentConfig& config, const std::vector<TrialRow>& rows,
                              const SummaryTable& summary);

// Full pipeline; returns a nonzero exit status when more than half of the
// trials failed.
int run_experiment(const ExperimentConfig& config, const std::string& data_root);

}  // namespace trisk
