#pragma once

#include <vector>

#include "rwprior/conv.hpp"
#include "rwprior/random.hpp"

namespace rwprior {

/// Fixed-point reverse filtering against a multi-scale Gaussian smoother
///   f(x) = sum_j mix_weights[j] * gaussian_blur(x, sigmas[j])   (circular padding)
///   x^0 = y,   x^(k+1) = x^k + y - f(x^k)
struct ReverseNet {
  std::vector<double> sigmas;
  std::vector<double> mix_weights;
  std::size_t iterations = 5;
  Padding padding = Padding::Circular;

  /// The mixed filter as one (1, 1, s, s) tap tensor, s the widest bank kernel.
  Tensor mixed_taps() const;
  void validate() const;
};

/// Sampled Gaussian of side 2 * ceil(3 sigma) + 1, normalized to sum 1.
Tensor gaussian_taps(double sigma);

/// One depthwise kernel (1, 1, s, s) per sigma, no bias.
std::vector<ConvKernel> gaussian_bank(const std::vector<double>& sigmas);

/// Applies the smoother f.
Tensor apply_smoother(const ReverseNet& net, const Tensor& x);

Tensor reverse_filter(const ReverseNet& net, const Tensor& y, std::size_t iterations);
inline Tensor reverse_filter(const ReverseNet& net, const Tensor& y) {
  return reverse_filter(net, y, net.iterations);
}

/// Gradient of <upstream, reverse_filter(net, y, iterations)> with respect to y.
Tensor reverse_filter_vjp(const ReverseNet& net, const Tensor& y, std::size_t iterations, const Tensor& upstream);

struct ContractionReport {
  double coefficient = 0.0;  // max over frequencies of |1 - lambda|
  bool contractive = false;  // coefficient < 1
};

/// Contraction coefficient of x -> x - f(x) on an h x w circular grid, from the
/// DFT eigenvalues of the filter taps (the filter is diagonal in that basis).
ContractionReport contraction_coefficient(const Tensor& taps, std::size_t h, std::size_t w,
                                          Padding padding = Padding::Circular);
ContractionReport contraction_coefficient(const ReverseNet& net, std::size_t h, std::size_t w);

/// Mixture weights are a softmax of standard normal draws.
ReverseNet make_reverse_net(SeededRng& rng, std::vector<double> sigmas, std::size_t iterations);

}  // namespace rwprior
