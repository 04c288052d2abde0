#pragma once

#include "rwprior/conv_stack.hpp"

namespace rwprior {

/// Central difference convolution in its kernel-sum form:
///   y(p0) = sum_n w(p_n) x(p0 + p_n) + bias - theta * x(p0) * sum_n w(p_n)
/// applied per (output, input) channel pair. theta = 0 is exactly conv2d.
Tensor cdc_layer(const Tensor& x, const ConvKernel& k, double theta, Padding padding = Padding::Zero);
Tensor cdc_layer_input_grad(const ConvKernel& k, double theta, const Tensor& upstream,
                            Padding padding = Padding::Zero);
ConvKernel cdc_layer_kernel_grad(const Tensor& x, const ConvKernel& k, double theta, const Tensor& upstream,
                                 Padding padding = Padding::Zero);

/// The 1x1 kernel -theta * sum_t w[o][i](t), without bias.
ConvKernel central_difference_kernel(const ConvKernel& k, double theta);

/// Stack of CDC layers sharing one theta, ReLU between layers.
struct CdcNet {
  ConvStack stack;

  double theta() const { return stack.theta; }
  Tensor forward(const Tensor& x) const { return stack.forward(x); }
};

void require_theta(double theta);

}  // namespace rwprior
