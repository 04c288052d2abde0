#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rwprior/experiment_config.hpp"
#include "rwprior/harness/train.hpp"

namespace rwprior {

struct RunOptions {
  std::size_t jobs = 1;       // concurrent training runs
  bool dump_images = false;   // write PGM samples of the first validation image
  bool quiet = true;
};

/// One CSV row: a MetricsRecord tagged with its grid cell and seed.
struct ResultRow {
  std::string config_label;
  std::uint64_t seed = 0;
  MetricsRecord metrics;
};

struct RunOutcome {
  std::string config_label;
  std::uint64_t seed = 0;
  bool aborted = false;
  std::size_t epochs = 0;
  double final_psnr = 0.0;
  double final_ssim = 0.0;
};

struct CellSummary {
  std::string config_label;
  std::size_t runs = 0;
  std::size_t aborted = 0;
  double psnr_mean = 0.0;
  double psnr_std = 0.0;
  double ssim_mean = 0.0;
  double ssim_std = 0.0;
  std::optional<double> delta_psnr;  // versus the "original" cell
  std::optional<double> delta_ssim;
};

struct ExperimentSummary {
  std::vector<CellSummary> cells;
  std::vector<RunOutcome> runs;

  std::size_t aborted_runs() const;
  const CellSummary* cell(const std::string& label) const;
};

inline constexpr const char* kCsvHeader =
    "config_label,seed,epoch,base_loss,prior_loss,total_loss,val_psnr,val_ssim,seconds";

/// Grid cell labels for cfg: cfg.cells, or {"custom"} when empty.
std::vector<std::string> cell_labels(const ExperimentConfig& cfg);

/// Trains every (cell, seed) pair and writes, under cfg.output_dir:
///   runs/<label>__seed<seed>.csv   per-run rows
///   results.csv                    all rows in grid order
///   summary.json                   per-cell mean/std of final PSNR/SSIM and deltas
///   config.json                    the resolved base config
/// Aborted runs are recorded and the remaining runs still execute.
ExperimentSummary run_experiment(const ExperimentConfig& cfg, const RunOptions& options = {});

/// Rebuilds the summary from CSV rows (status inferred from non-finite losses).
ExperimentSummary summarize(const std::vector<ResultRow>& rows);

std::string format_csv_row(const ResultRow& row);
std::vector<ResultRow> parse_csv(const std::string& text);

std::string summary_to_json(const ExperimentSummary& summary);

/// `analyze --in dir`: reads dir/results.csv (or dir/runs/*.csv) and rewrites dir/summary.json.
ExperimentSummary analyze_directory(const std::string& dir);

/// Returns cfg with its seeds replaced by the MANIFOLD_LOSS_SEED value, if set.
ExperimentConfig apply_seed_env(ExperimentConfig cfg, const char* env_value);

}  // namespace rwprior
