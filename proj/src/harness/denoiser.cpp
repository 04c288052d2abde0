#include "rwprior/harness/denoiser.hpp"

#include <cmath>
#include <stdexcept>

namespace rwprior {

void DenoiserConfig::validate() const {
  if (layers < 1) throw std::invalid_argument("layers: must be at least 1");
  if (channels < 1) throw std::invalid_argument("channels: must be at least 1");
  if (kernel < 1 || kernel % 2 == 0) throw std::invalid_argument("kernel: must be a positive odd size");
}

Tensor DenoiserModel::forward(const Tensor& noisy) const { return noisy - body.forward(noisy); }

Tensor DenoiserModel::forward(const Tensor& noisy, ConvStack::Trace& trace) const {
  return noisy - body.forward(noisy, trace);
}

std::vector<ConvKernel> DenoiserModel::backward(const ConvStack::Trace& trace, const Tensor& upstream) const {
  std::vector<ConvKernel> grads;
  body.backward(trace, upstream * -1.0, grads);
  return grads;
}

DenoiserModel make_denoiser(const DenoiserConfig& cfg, std::size_t image_channels, std::uint64_t seed) {
  cfg.validate();
  SeededRng rng(seed);
  return {make_conv_stack(rng, image_channels, cfg.channels, image_channels, cfg.layers, cfg.kernel,
                          InitScheme::Kaiming)};
}

namespace {

template <class F>
void for_each_param(std::vector<ConvKernel>& params, const std::vector<ConvKernel>& grads, F&& f) {
  std::size_t slot = 0;
  for (std::size_t l = 0; l < params.size(); ++l) {
    f(slot++, params[l].weights.values(), grads[l].weights.values());
    f(slot++, std::span<double>(params[l].bias), std::span<const double>(grads[l].bias));
  }
}

}  // namespace

void Adam::step(std::vector<ConvKernel>& params, const std::vector<ConvKernel>& grads) {
  if (params.size() != grads.size()) throw std::invalid_argument("Adam::step: parameter/gradient count mismatch");
  if (m_.empty()) {
    for_each_param(params, grads, [&](std::size_t, std::span<double> p, std::span<const double>) {
      m_.emplace_back(p.size(), 0.0);
      v_.emplace_back(p.size(), 0.0);
    });
  }
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for_each_param(params, grads, [&](std::size_t slot, std::span<double> p, std::span<const double> g) {
    if (g.size() != p.size()) throw std::invalid_argument("Adam::step: gradient shape mismatch");
    std::vector<double>& m = m_[slot];
    std::vector<double>& v = v_[slot];
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = beta1_ * m[i] + (1.0 - beta1_) * g[i];
      v[i] = beta2_ * v[i] + (1.0 - beta2_) * g[i] * g[i];
      p[i] -= lr_ * (m[i] / c1) / (std::sqrt(v[i] / c2) + eps_);
    }
  });
}

}  // namespace rwprior
