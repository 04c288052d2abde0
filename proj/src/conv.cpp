#include "rwprior/conv.hpp"

namespace rwprior {

ConvKernel::ConvKernel(std::size_t out_channels, std::size_t in_channels, std::size_t kh, std::size_t kw,
                       bool with_bias)
    : weights({out_channels, in_channels, kh, kw}), bias(with_bias ? out_channels : 0, 0.0) {}

ConvKernel::ConvKernel(Tensor w, std::vector<double> b) : weights(std::move(w)), bias(std::move(b)) {
  validate();
}

void ConvKernel::validate() const {
  const Shape s = weights.shape();
  if (s.h % 2 == 0 || s.w % 2 == 0)
    throw ShapeError("conv kernel extents must be odd, got " + to_string(s));
  if (!bias.empty() && bias.size() != s.n)
    throw ShapeError("conv kernel bias has " + std::to_string(bias.size()) + " entries for " +
                     std::to_string(s.n) + " output channels");
}

ConvGrads conv2d_vjp(const Tensor& x, const ConvKernel& k, const Tensor& upstream, Padding padding) {
  if (upstream.shape() != Shape{x.shape().n, k.out_channels(), x.shape().h, x.shape().w})
    throw ShapeError("conv2d_vjp: upstream shape " + to_string(upstream.shape()) +
                     " does not match conv2d output for input " + to_string(x.shape()) + " and kernel " +
                     to_string(k.weights.shape()));
  return {conv2d_input_grad(k, upstream, padding), conv2d_kernel_grad(x, k, upstream, padding)};
}

}  // namespace rwprior
