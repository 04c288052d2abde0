#pragma once

#include "rwprior/conv.hpp"
#include "rwprior/random.hpp"
#include "rwprior/tensor.hpp"

namespace rwprior::testing {

inline Tensor random_tensor(SeededRng& rng, Shape s, double lo = -1.0, double hi = 1.0) {
  Tensor t(s);
  for (double& v : t.values()) v = lo + (hi - lo) * rng.uniform();
  return t;
}

inline ConvKernel random_kernel(SeededRng& rng, std::size_t out, std::size_t in, std::size_t k, bool bias = true) {
  ConvKernel c(out, in, k, k, bias);
  for (double& v : c.weights.values()) v = rng.normal() * 0.5;
  for (double& b : c.bias) b = rng.normal() * 0.1;
  return c;
}

inline ConvKernel identity_kernel(std::size_t channels, std::size_t k) {
  ConvKernel c(channels, channels, k, k, false);
  for (std::size_t i = 0; i < channels; ++i) c.w(i, i, k / 2, k / 2) = 1.0;
  return c;
}

/// sum(out * weights): a generic scalar reduction for gradient checks.
inline double dot(const Tensor& a, const Tensor& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace rwprior::testing
