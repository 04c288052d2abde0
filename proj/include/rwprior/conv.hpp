#pragma once

#include <vector>

#include "rwprior/tensor.hpp"

namespace rwprior {

enum class Padding { Zero, Circular };

/// Convolution weights of shape (out_channels, in_channels, kh, kw) plus an
/// optional per-output-channel bias (empty means no bias). kh and kw are odd.
struct ConvKernel {
  Tensor weights;
  std::vector<double> bias;

  ConvKernel() = default;
  ConvKernel(std::size_t out_channels, std::size_t in_channels, std::size_t kh, std::size_t kw,
             bool with_bias = true);
  ConvKernel(Tensor w, std::vector<double> b);

  std::size_t out_channels() const { return weights.shape().n; }
  std::size_t in_channels() const { return weights.shape().c; }
  std::size_t kh() const { return weights.shape().h; }
  std::size_t kw() const { return weights.shape().w; }
  bool has_bias() const { return !bias.empty(); }

  double& w(std::size_t o, std::size_t i, std::size_t y, std::size_t x) { return weights.at(o, i, y, x); }
  double w(std::size_t o, std::size_t i, std::size_t y, std::size_t x) const { return weights.at(o, i, y, x); }

  /// Throws ShapeError unless the kernel is well formed (odd extents, bias size).
  void validate() const;

  bool operator==(const ConvKernel&) const = default;
};

/// Gradients of conv2d with respect to its input and its kernel.
struct ConvGrads {
  Tensor input;
  ConvKernel kernel;
};

/// Stride-1 "same" convolution (cross-correlation):
///   y[o](p) = bias[o] + sum_i sum_t w[o][i](t) * x[i](p + t - center)
/// with out-of-range reads resolved by `padding`.
Tensor conv2d(const Tensor& x, const ConvKernel& k, Padding padding = Padding::Zero);

/// Adjoint of conv2d with respect to the input only (the kernel is fixed).
Tensor conv2d_input_grad(const ConvKernel& k, const Tensor& upstream, Padding padding = Padding::Zero);

/// Adjoint of conv2d with respect to the kernel weights and bias.
ConvKernel conv2d_kernel_grad(const Tensor& x, const ConvKernel& k, const Tensor& upstream,
                              Padding padding = Padding::Zero);

ConvGrads conv2d_vjp(const Tensor& x, const ConvKernel& k, const Tensor& upstream,
                     Padding padding = Padding::Zero);

/// Applies the single 2-D filter `taps` (shape (1, 1, kh, kw)) to every channel independently.
Tensor depthwise_conv2d(const Tensor& x, const Tensor& taps, Padding padding);
Tensor depthwise_conv2d_input_grad(const Tensor& taps, const Tensor& upstream, Padding padding);

/// Worker threads used by the OpenMP kernels; 1 disables parallel regions.
/// Results are bit-identical for any thread count.
void set_kernel_threads(int threads);
int kernel_threads();

/// Plain nested-loop versions of the kernels above, kept as the test oracle
/// and benchmark baseline.
namespace reference {

Tensor conv2d(const Tensor& x, const ConvKernel& k, Padding padding = Padding::Zero);
Tensor conv2d_input_grad(const ConvKernel& k, const Tensor& upstream, Padding padding = Padding::Zero);
ConvKernel conv2d_kernel_grad(const Tensor& x, const ConvKernel& k, const Tensor& upstream,
                              Padding padding = Padding::Zero);
Tensor depthwise_conv2d(const Tensor& x, const Tensor& taps, Padding padding);
Tensor depthwise_conv2d_input_grad(const Tensor& taps, const Tensor& upstream, Padding padding);

}  // namespace reference

}  // namespace rwprior
