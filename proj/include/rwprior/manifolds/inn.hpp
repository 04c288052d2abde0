#pragma once

#include <vector>

#include "rwprior/conv_stack.hpp"

namespace rwprior {

/// Additive coupling block on a channel-split input (x1, x2):
///   y1 = x1 + F(x2)
///   y2 = x2 + G(y1)
/// F and G map C/2 channels to C/2 channels and need not be invertible.
struct CouplingBlock {
  ConvStack f;
  ConvStack g;
};

/// space_to_depth followed by a chain of coupling blocks.
struct InnNet {
  std::vector<CouplingBlock> blocks;
};

/// Coupling body only: operates on an already space-to-depth'ed tensor.
Tensor inn_coupling_forward(const InnNet& net, const Tensor& z);
Tensor inn_coupling_inverse(const InnNet& net, const Tensor& z);

Tensor inn_forward(const InnNet& net, const Tensor& x);
/// x2 = y2 - G(y1), x1 = y1 - F(x2), blocks undone last to first, then depth_to_space.
Tensor inn_inverse(const InnNet& net, const Tensor& y);

/// Gradient of <upstream, inn_forward(net, x)> with respect to x.
Tensor inn_vjp(const InnNet& net, const Tensor& x, const Tensor& upstream);

/// Largest input accepted by inn_jacobian_det.
inline constexpr std::size_t kMaxJacobianElements = 64;

/// Determinant of the central-difference Jacobian of the coupling body at
/// space_to_depth(x). space_to_depth itself is a permutation and is left out.
double inn_jacobian_det(const InnNet& net, const Tensor& x, double step = 1e-5);

/// Determinant of a dense row-major n x n matrix (LU with partial pivoting).
double determinant(std::vector<double> a, std::size_t n);

/// `blocks` coupling blocks on `channels` input channels (must be even); each
/// F and G is a `subnet_depth`-layer stack of the given hidden width.
InnNet make_inn_net(SeededRng& rng, std::size_t channels, std::size_t width, std::size_t blocks,
                    std::size_t subnet_depth, std::size_t kernel, InitScheme scheme);

}  // namespace rwprior
