#pragma once

#include <vector>

#include "rwprior/conv_stack.hpp"

namespace rwprior {

/// Taylor unfolding network.
///
///   f_out   = F(y)
///   g^1     = G(concat(f_out, y))
///   g^(k+1) = G(concat(g^k, y))
///   O       = f_out + sum_{k=1..n} g^k / k!
///
/// G is one set of weights reused at every order.
struct TaylorNet {
  ConvStack mapping;     // F: image channels -> width
  ConvStack derivative;  // G: width + image channels -> width
  std::size_t order = 3;

  std::size_t image_channels() const { return mapping.in_channels(); }
  std::size_t feature_channels() const { return mapping.out_channels(); }
};

/// The terms {f_out, g^1, ..., g^order}, unscaled.
std::vector<Tensor> taylor_terms(const TaylorNet& net, const Tensor& y, std::size_t order);

Tensor taylor_forward(const TaylorNet& net, const Tensor& y, std::size_t order);
inline Tensor taylor_forward(const TaylorNet& net, const Tensor& y) { return taylor_forward(net, y, net.order); }

/// Gradient of <upstream, taylor_forward(net, y, order)> with respect to y.
Tensor taylor_vjp(const TaylorNet& net, const Tensor& y, std::size_t order, const Tensor& upstream);

TaylorNet make_taylor_net(SeededRng& rng, std::size_t image_channels, std::size_t width, std::size_t depth,
                          std::size_t kernel, std::size_t order, InitScheme scheme);

}  // namespace rwprior
