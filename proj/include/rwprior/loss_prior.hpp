#pragma once

#include <cstdint>
#include <vector>

#include "rwprior/manifolds/network.hpp"
#include "rwprior/ops.hpp"

namespace rwprior {

enum class EnsembleReduce { Mean };

/// Base image-level norm, prior weight and the loss-network ensemble.
struct LossSpec {
  Norm base_norm = Norm::L2;
  double lambda = 0.1;
  std::vector<RandomNetConfig> nets;
  EnsembleReduce ensemble_reduce = EnsembleReduce::Mean;

  void validate() const;
  bool operator==(const LossSpec&) const = default;
};

using NetworkSet = std::vector<LossNetwork>;

struct LossBreakdown {
  double total = 0.0;
  double base = 0.0;
  double prior = 0.0;
};

/// Mean over nets of ||f(gt) - f(y)|| under spec.base_norm; 0 for no nets.
double prior_loss(const LossSpec& spec, const NetworkSet& nets, const Tensor& gt, const Tensor& y);

/// total = ||gt - y|| + lambda * prior_loss.
LossBreakdown total_loss(const LossSpec& spec, const NetworkSet& nets, const Tensor& gt, const Tensor& y);

/// d total / d y. Network weights are constants.
Tensor total_loss_grad(const LossSpec& spec, const NetworkSet& nets, const Tensor& gt, const Tensor& y);

/// Loss and gradient from one pass; the prior is skipped entirely when
/// lambda == 0 or there are no nets.
LossBreakdown total_loss_and_grad(const LossSpec& spec, const NetworkSet& nets, const Tensor& gt, const Tensor& y,
                                  Tensor& grad);

/// Weights for every net at `epoch` (or optimizer step, for EachStep):
/// net i is seeded with derive_epoch_seed(base_seed + nets[i].seed, i, e),
/// e = 0 under Once and e = epoch otherwise.
NetworkSet refresh_weights(const LossSpec& spec, std::uint64_t base_seed, std::uint64_t epoch,
                           std::size_t image_channels = 1);

}  // namespace rwprior
