#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rwprior/harness/dataset.hpp"
#include "rwprior/harness/denoiser.hpp"
#include "rwprior/loss_prior.hpp"

namespace rwprior {

struct OptimizerConfig {
  double lr = 1e-3;
  std::size_t epochs = 30;
  std::size_t batch = 16;

  bool operator==(const OptimizerConfig&) const = default;
};

/// Everything a training run or an ablation grid needs.
///
/// `cells` lists grid cell labels such as "original" or "cdc+epochR"; each
/// label is a '+'-joined sequence of presets applied over this config. An
/// empty list runs the config as-is under the label "custom".
struct ExperimentConfig {
  SyntheticDatasetSpec dataset;
  DenoiserConfig model;
  LossSpec loss;
  OptimizerConfig optimizer;
  std::vector<std::uint64_t> seeds{0};
  std::vector<std::string> cells;
  std::string output_dir = "results";

  /// Throws std::invalid_argument whose message starts with the JSON path.
  void validate() const;
  bool operator==(const ExperimentConfig&) const = default;
};

}  // namespace rwprior
