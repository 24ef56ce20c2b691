#pragma once

// Experiment drivers: baseline, evolution, grid search and model evaluation,
// with their on-disk artifacts.
//
// Output directory of a run:
//   config.ini          canonical copy of the resolved configuration
//   seeds.txt           one run seed per line
//   results.json        RunRecord (or grid table) as JSON
//   traces/             residual traces, one CSV per seed
//   history_seed<k>.csv GA history (evolve)
//   checkpoint_seed<k>.bin, model_seed<k>.json (evolve)
//   grid.csv            long-format grid table (grid)

#include "evoesn/config.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace evoesn {

struct SeedResult {
  std::uint64_t seed = 0;
  bool ok = true;
  std::string error;
  std::map<std::string, double> metrics;
  std::vector<double> residuals;
  /// Evolve only.
  std::vector<GenerationRecord> history;
  double wall_seconds = 0.0;
};

struct RunRecord {
  std::string kind;  // baseline | evolve | evaluate
  std::string config_hash;
  std::string version = EVOESN_VERSION;
  std::vector<SeedResult> runs;
  double wall_seconds = 0.0;

  Index failures() const;
  /// Mean and sample standard deviation of `metric` over successful runs.
  std::pair<double, double> summary(const std::string& metric) const;
  /// Metric names present in every successful run.
  std::vector<std::string> metric_names() const;
};

std::string to_json(const RunRecord& record, bool include_timings = true);

/// Same config hash, seeds, failure pattern and metric values within `tol`.
bool same_results(const RunRecord& a, const RunRecord& b, double tol = 1e-12);

/// Seeds seed, seed+1, ..., seed+repeats-1.
std::vector<std::uint64_t> run_seeds(const RunConfig& run);

/// Series of the configured task with its split annotations.
TimeSeries build_series(const ExperimentConfig& config);

/// Hyperparameters with the output dimension taken from `series`.
EsnHyperparameters resolved_hyper(const ExperimentConfig& config, const TimeSeries& series);

EvoSettings resolved_evo_settings(const ExperimentConfig& config);

/// Trains and tests one randomly initialized ESN. Failures are recorded in
/// the result, not thrown.
SeedResult baseline_seed(const ExperimentConfig& config, const TimeSeries& series, std::uint64_t seed);

/// Runs every seed (in parallel over `workers`); writes artifacts when
/// `out` is given.
RunRecord run_baseline(const ExperimentConfig& config, unsigned workers,
                       const std::optional<std::filesystem::path>& out = std::nullopt);

struct EvolveOptions {
  /// Stop every seed at this generation (for staged runs).
  std::optional<Index> stop_at;
  /// Continue from checkpoints found in the output directory.
  bool resume = false;
  /// Print one line per generation.
  bool verbose = false;
};

RunRecord run_evolve(const ExperimentConfig& config, unsigned workers,
                     const std::optional<std::filesystem::path>& out = std::nullopt, const EvolveOptions& options = {});

/// Re-reads `dir/config.ini` and continues the evolve run from its
/// checkpoints.
RunRecord resume_evolve(const std::filesystem::path& dir, unsigned workers, const EvolveOptions& options = {});

struct GridCellResult {
  Index cell = 0;
  std::vector<std::pair<std::string, double>> coordinates;
  RunRecord record;
};

std::vector<GridCellResult> run_grid(const ExperimentConfig& config, unsigned workers,
                                     const std::optional<std::filesystem::path>& out = std::nullopt);

/// Tests a saved model on the configured task.
RunRecord evaluate_saved_model(const ExperimentConfig& config, const std::filesystem::path& model_path,
                               const std::optional<std::filesystem::path>& out = std::nullopt);

/// Checks that `dir` holds a complete run: parsable config with the hash
/// recorded in results.json, matching seed list, and per-seed traces and
/// histories. Returns the problems found (empty when valid).
std::vector<std::string> validate_manifest(const std::filesystem::path& dir);

}  // namespace evoesn
