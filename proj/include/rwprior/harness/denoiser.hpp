#pragma once

#include <cstdint>
#include <vector>

#include "rwprior/conv_stack.hpp"

namespace rwprior {

struct DenoiserConfig {
  std::size_t layers = 5;
  std::size_t channels = 16;
  std::size_t kernel = 3;

  void validate() const;
  bool operator==(const DenoiserConfig&) const = default;
};

/// Residual denoiser: the conv stack predicts the noise, which is subtracted
/// from the input.
struct DenoiserModel {
  ConvStack body;

  Tensor forward(const Tensor& noisy) const;
  Tensor forward(const Tensor& noisy, ConvStack::Trace& trace) const;
  /// Weight gradients for d loss / d output = upstream.
  std::vector<ConvKernel> backward(const ConvStack::Trace& trace, const Tensor& upstream) const;
};

DenoiserModel make_denoiser(const DenoiserConfig& cfg, std::size_t image_channels, std::uint64_t seed);

/// Adam with bias correction over a list of conv kernels.
class Adam {
public:
  explicit Adam(double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

  void step(std::vector<ConvKernel>& params, const std::vector<ConvKernel>& grads);

private:
  double lr_, beta1_, beta2_, eps_;
  std::size_t t_ = 0;
  std::vector<std::vector<double>> m_, v_;
};

}  // namespace rwprior
