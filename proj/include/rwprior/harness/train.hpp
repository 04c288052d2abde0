#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "rwprior/experiment_config.hpp"

namespace rwprior {

struct MetricsRecord {
  std::size_t epoch = 0;  // 1-based count of completed epochs
  double base_loss = 0.0;
  double prior_loss = 0.0;
  double total_loss = 0.0;
  double val_psnr = 0.0;
  double val_ssim = 0.0;
  double seconds = 0.0;  // wall-clock since the run started
};

struct QualityScores {
  double psnr = 0.0;
  double ssim = 0.0;
};

/// Clean and noisy images of one index range, stacked along the batch axis.
struct ImageSet {
  Tensor clean;
  Tensor noisy;

  std::size_t size() const { return clean.shape().n; }
};

ImageSet load_images(const SyntheticDatasetSpec& spec, std::size_t first, std::size_t count);

/// Mean per-image PSNR / SSIM of the model output against the clean images.
QualityScores evaluate(const DenoiserModel& model, const ImageSet& images);
/// Same for the noisy inputs themselves.
QualityScores evaluate_identity(const ImageSet& images);

struct TrainResult {
  std::vector<MetricsRecord> records;
  bool aborted = false;
  DenoiserModel model;
};

using EpochCallback = std::function<void(const MetricsRecord&)>;

/// Trains the residual denoiser with Adam on total_loss. Loss-network weights
/// are refreshed per their reinit policy; validation uses the images after
/// the training range. A non-finite loss stops the run after recording the
/// offending epoch.
TrainResult train(const ExperimentConfig& cfg, std::uint64_t seed, const EpochCallback& on_epoch = {});
inline TrainResult train(const ExperimentConfig& cfg) { return train(cfg, cfg.seeds.at(0)); }

/// Seed used for the denoiser's initial weights in a run with `seed`.
std::uint64_t model_init_seed(std::uint64_t seed);

}  // namespace rwprior
