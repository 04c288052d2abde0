#pragma once

#include <cstddef>
#include <string>

#include "rwprior/conv.hpp"

namespace rwprior::detail {

inline void check_conv_input(const Tensor& x, const ConvKernel& k) {
  k.validate();
  if (x.shape().c != k.in_channels())
    throw ShapeError("conv2d: input shape " + to_string(x.shape()) + " does not match kernel shape " +
                     to_string(k.weights.shape()));
}

inline void check_conv_upstream(const ConvKernel& k, const Tensor& upstream) {
  k.validate();
  if (upstream.shape().c != k.out_channels())
    throw ShapeError("conv2d backward: upstream shape " + to_string(upstream.shape()) +
                     " does not match kernel shape " + to_string(k.weights.shape()));
}

inline void check_taps(const Tensor& taps) {
  const Shape s = taps.shape();
  if (s.n != 1 || s.c != 1 || s.h % 2 == 0 || s.w % 2 == 0)
    throw ShapeError("depthwise filter must have shape (1, 1, odd, odd), got " + to_string(s));
}

/// Resolves a possibly out-of-range coordinate; returns -1 when it reads zero padding.
inline std::ptrdiff_t resolve(std::ptrdiff_t p, std::ptrdiff_t extent, Padding padding) {
  if (p >= 0 && p < extent) return p;
  if (padding == Padding::Zero) return -1;
  const std::ptrdiff_t m = p % extent;
  return m < 0 ? m + extent : m;
}

}  // namespace rwprior::detail
