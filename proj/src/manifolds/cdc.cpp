#include "rwprior/manifolds/cdc.hpp"

#include <string>

namespace rwprior {

void require_theta(double theta) {
  if (!(theta >= 0.0 && theta <= 1.0))
    throw std::invalid_argument("cdc theta must lie in [0, 1], got " + std::to_string(theta));
}

ConvKernel central_difference_kernel(const ConvKernel& k, double theta) {
  ConvKernel c(k.out_channels(), k.in_channels(), 1, 1, false);
  for (std::size_t o = 0; o < k.out_channels(); ++o)
    for (std::size_t i = 0; i < k.in_channels(); ++i) {
      double sum = 0.0;
      for (std::size_t y = 0; y < k.kh(); ++y)
        for (std::size_t x = 0; x < k.kw(); ++x) sum += k.w(o, i, y, x);
      c.w(o, i, 0, 0) = -theta * sum;
    }
  return c;
}

Tensor cdc_layer(const Tensor& x, const ConvKernel& k, double theta, Padding padding) {
  require_theta(theta);
  Tensor y = conv2d(x, k, padding);
  if (theta != 0.0) y += conv2d(x, central_difference_kernel(k, theta), padding);
  return y;
}

Tensor cdc_layer_input_grad(const ConvKernel& k, double theta, const Tensor& upstream, Padding padding) {
  require_theta(theta);
  Tensor g = conv2d_input_grad(k, upstream, padding);
  if (theta != 0.0) g += conv2d_input_grad(central_difference_kernel(k, theta), upstream, padding);
  return g;
}

ConvKernel cdc_layer_kernel_grad(const Tensor& x, const ConvKernel& k, double theta, const Tensor& upstream,
                                 Padding padding) {
  require_theta(theta);
  ConvKernel g = conv2d_kernel_grad(x, k, upstream, padding);
  if (theta == 0.0) return g;
  // Every tap contributes -theta * (center gradient) through the kernel sum.
  const ConvKernel gc = conv2d_kernel_grad(x, central_difference_kernel(k, theta), upstream, padding);
  for (std::size_t o = 0; o < k.out_channels(); ++o)
    for (std::size_t i = 0; i < k.in_channels(); ++i)
      for (std::size_t y = 0; y < k.kh(); ++y)
        for (std::size_t xx = 0; xx < k.kw(); ++xx) g.w(o, i, y, xx) -= theta * gc.w(o, i, 0, 0);
  return g;
}

}  // namespace rwprior
