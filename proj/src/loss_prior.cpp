#include "rwprior/loss_prior.hpp"

#include <string>

namespace rwprior {

void LossSpec::validate() const {
  if (!(lambda >= 0.0)) throw std::invalid_argument("lambda: must be non-negative");
  for (std::size_t i = 0; i < nets.size(); ++i) {
    try {
      nets[i].validate();
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("nets[" + std::to_string(i) + "]." + e.what());
    }
  }
}

namespace {

void check_nets(const LossSpec& spec, const NetworkSet& nets) {
  if (nets.size() != spec.nets.size())
    throw std::invalid_argument("loss spec lists " + std::to_string(spec.nets.size()) + " nets but " +
                                std::to_string(nets.size()) + " weight sets were given");
}

}  // namespace

double prior_loss(const LossSpec& spec, const NetworkSet& nets, const Tensor& gt, const Tensor& y) {
  require_same_shape(gt, y, "prior_loss");
  check_nets(spec, nets);
  if (nets.empty()) return 0.0;
  double acc = 0.0;
  for (const LossNetwork& net : nets)
    acc += reduce_norm(network_forward(net, gt), network_forward(net, y), spec.base_norm);
  return acc / static_cast<double>(nets.size());
}

LossBreakdown total_loss(const LossSpec& spec, const NetworkSet& nets, const Tensor& gt, const Tensor& y) {
  LossBreakdown out;
  out.base = reduce_norm(y, gt, spec.base_norm);
  out.prior = prior_loss(spec, nets, gt, y);
  out.total = out.base + spec.lambda * out.prior;
  return out;
}

LossBreakdown total_loss_and_grad(const LossSpec& spec, const NetworkSet& nets, const Tensor& gt, const Tensor& y,
                                  Tensor& grad) {
  require_same_shape(gt, y, "total_loss");
  check_nets(spec, nets);
  LossBreakdown out;
  out.base = reduce_norm(y, gt, spec.base_norm);
  grad = reduce_norm_grad(y, gt, spec.base_norm);
  out.total = out.base;
  if (spec.lambda == 0.0 || nets.empty()) return out;

  const double scale = spec.lambda / static_cast<double>(nets.size());
  double acc = 0.0;
  for (const LossNetwork& net : nets) {
    const Tensor feat_gt = network_forward(net, gt);
    const Tensor feat_y = network_forward(net, y);
    acc += reduce_norm(feat_y, feat_gt, spec.base_norm);
    Tensor upstream = reduce_norm_grad(feat_y, feat_gt, spec.base_norm);
    upstream *= scale;
    grad += network_vjp(net, y, upstream);
  }
  out.prior = acc / static_cast<double>(nets.size());
  out.total = out.base + spec.lambda * out.prior;
  return out;
}

Tensor total_loss_grad(const LossSpec& spec, const NetworkSet& nets, const Tensor& gt, const Tensor& y) {
  Tensor grad;
  total_loss_and_grad(spec, nets, gt, y, grad);
  return grad;
}

NetworkSet refresh_weights(const LossSpec& spec, std::uint64_t base_seed, std::uint64_t epoch,
                           std::size_t image_channels) {
  NetworkSet out;
  out.reserve(spec.nets.size());
  for (std::size_t i = 0; i < spec.nets.size(); ++i) {
    const RandomNetConfig& cfg = spec.nets[i];
    const std::uint64_t e = cfg.reinit == ReinitPolicy::Once ? 0 : epoch;
    out.push_back(build_network(cfg, image_channels, derive_epoch_seed(base_seed + cfg.seed, i, e)));
  }
  return out;
}

}  // namespace rwprior
