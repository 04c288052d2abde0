#include "rwprior/manifolds/inn.hpp"

#include <cmath>
#include <utility>

#include "rwprior/ops.hpp"

namespace rwprior {

namespace {

void check_body_input(const InnNet& net, const Tensor& z, const char* what) {
  const std::size_t c = z.shape().c;
  if (c % 2 != 0) throw ShapeError(std::string(what) + ": coupling input needs an even channel count, got " +
                                   to_string(z.shape()));
  for (const CouplingBlock& b : net.blocks)
    if (b.f.in_channels() != c / 2 || b.f.out_channels() != c / 2 || b.g.in_channels() != c / 2 ||
        b.g.out_channels() != c / 2)
      throw ShapeError(std::string(what) + ": coupling sub-networks do not map " + std::to_string(c / 2) +
                       " channels to " + std::to_string(c / 2) + " for input " + to_string(z.shape()));
}

}  // namespace

Tensor inn_coupling_forward(const InnNet& net, const Tensor& z) {
  check_body_input(net, z, "inn_forward");
  auto [x1, x2] = channel_split(z);
  for (const CouplingBlock& b : net.blocks) {
    x1 += b.f.forward(x2);
    x2 += b.g.forward(x1);
  }
  return channel_concat(x1, x2);
}

Tensor inn_coupling_inverse(const InnNet& net, const Tensor& z) {
  check_body_input(net, z, "inn_inverse");
  auto [y1, y2] = channel_split(z);
  for (auto it = net.blocks.rbegin(); it != net.blocks.rend(); ++it) {
    y2 -= it->g.forward(y1);
    y1 -= it->f.forward(y2);
  }
  return channel_concat(y1, y2);
}

Tensor inn_forward(const InnNet& net, const Tensor& x) { return inn_coupling_forward(net, space_to_depth(x)); }

Tensor inn_inverse(const InnNet& net, const Tensor& y) { return depth_to_space(inn_coupling_inverse(net, y)); }

Tensor inn_vjp(const InnNet& net, const Tensor& x, const Tensor& upstream) {
  const Tensor z = space_to_depth(x);
  check_body_input(net, z, "inn_vjp");
  require_same_shape(z, upstream, "inn_vjp");

  struct Step {
    ConvStack::Trace f, g;
  };
  std::vector<Step> steps(net.blocks.size());
  auto [x1, x2] = channel_split(z);
  for (std::size_t b = 0; b < net.blocks.size(); ++b) {
    x1 += net.blocks[b].f.forward(x2, steps[b].f);
    x2 += net.blocks[b].g.forward(x1, steps[b].g);
  }

  auto [d1, d2] = channel_split(upstream);
  for (std::size_t b = net.blocks.size(); b-- > 0;) {
    // y2 = x2 + G(y1): y1 also receives G's input gradient.
    d1 += net.blocks[b].g.backward(steps[b].g, d2);
    // y1 = x1 + F(x2)
    d2 += net.blocks[b].f.backward(steps[b].f, d1);
  }
  return depth_to_space(channel_concat(d1, d2));
}

double determinant(std::vector<double> a, std::size_t n) {
  if (a.size() != n * n) throw std::invalid_argument("determinant: matrix is not n x n");
  double det = 1.0;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r * n + col]) > std::abs(a[pivot * n + col])) pivot = r;
    if (a[pivot * n + col] == 0.0) return 0.0;
    if (pivot != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(a[pivot * n + c], a[col * n + c]);
      det = -det;
    }
    const double p = a[col * n + col];
    det *= p;
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r * n + col] / p;
      if (f == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
    }
  }
  return det;
}

double inn_jacobian_det(const InnNet& net, const Tensor& x, double step) {
  if (x.size() > kMaxJacobianElements)
    throw ShapeError("inn_jacobian_det: input " + to_string(x.shape()) + " has " + std::to_string(x.size()) +
                     " elements, at most " + std::to_string(kMaxJacobianElements) + " supported");
  Tensor z = space_to_depth(x);
  const std::size_t n = z.size();
  std::vector<double> jac(n * n);
  for (std::size_t j = 0; j < n; ++j) {
    const double orig = z[j];
    z[j] = orig + step;
    const Tensor fp = inn_coupling_forward(net, z);
    z[j] = orig - step;
    const Tensor fm = inn_coupling_forward(net, z);
    z[j] = orig;
    for (std::size_t i = 0; i < n; ++i) jac[i * n + j] = (fp[i] - fm[i]) / (2.0 * step);
  }
  return determinant(std::move(jac), n);
}

InnNet make_inn_net(SeededRng& rng, std::size_t channels, std::size_t width, std::size_t blocks,
                    std::size_t subnet_depth, std::size_t kernel, InitScheme scheme) {
  if (channels % 2 != 0) throw ShapeError("make_inn_net: coupling channels must be even");
  InnNet net;
  const std::size_t half = channels / 2;
  for (std::size_t b = 0; b < blocks; ++b) {
    CouplingBlock block;
    block.f = make_conv_stack(rng, half, width, half, subnet_depth, kernel, scheme);
    block.g = make_conv_stack(rng, half, width, half, subnet_depth, kernel, scheme);
    net.blocks.push_back(std::move(block));
  }
  return net;
}

}  // namespace rwprior
