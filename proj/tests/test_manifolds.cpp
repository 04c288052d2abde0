#include <gtest/gtest.h>

#include <cmath>

#include "rwprior/gradcheck.hpp"
#include "rwprior/manifolds/cdc.hpp"
#include "rwprior/manifolds/inn.hpp"
#include "rwprior/manifolds/network.hpp"
#include "rwprior/manifolds/reverse.hpp"
#include "rwprior/manifolds/taylor.hpp"
#include "rwprior/ops.hpp"
#include "test_util.hpp"

using namespace rwprior;
using rwprior::testing::dot;
using rwprior::testing::identity_kernel;
using rwprior::testing::random_kernel;
using rwprior::testing::random_tensor;

namespace {

double l2(const Tensor& a) { return std::sqrt(dot(a, a)); }

// Neighbour-minus-centre form, evaluated tap by tap.
Tensor cdc_explicit(const Tensor& x, const ConvKernel& k) {
  const Shape s = x.shape();
  const auto H = static_cast<std::ptrdiff_t>(s.h), W = static_cast<std::ptrdiff_t>(s.w);
  const auto ch = static_cast<std::ptrdiff_t>(k.kh() / 2), cw = static_cast<std::ptrdiff_t>(k.kw() / 2);
  Tensor y({s.n, k.out_channels(), s.h, s.w});
  for (std::size_t n = 0; n < s.n; ++n)
    for (std::size_t o = 0; o < k.out_channels(); ++o)
      for (std::ptrdiff_t py = 0; py < H; ++py)
        for (std::ptrdiff_t px = 0; px < W; ++px) {
          double acc = 0.0;
          for (std::size_t i = 0; i < s.c; ++i)
            for (std::size_t ky = 0; ky < k.kh(); ++ky)
              for (std::size_t kx = 0; kx < k.kw(); ++kx) {
                const std::ptrdiff_t sy = py + static_cast<std::ptrdiff_t>(ky) - ch;
                const std::ptrdiff_t sx = px + static_cast<std::ptrdiff_t>(kx) - cw;
                const double nb = (sy < 0 || sy >= H || sx < 0 || sx >= W) ? 0.0 : x.at(n, i, sy, sx);
                acc += k.w(o, i, ky, kx) * (nb - x.at(n, i, py, px));
              }
          y.at(n, o, py, px) = acc;
        }
  return y;
}

ConvStack single_layer(ConvKernel k) {
  ConvStack s;
  s.layers.push_back(std::move(k));
  return s;
}

InnNet zero_inn(std::size_t half, std::size_t blocks) {
  InnNet net;
  for (std::size_t b = 0; b < blocks; ++b) {
    ConvStack f, g;
    f.layers = {ConvKernel(3, half, 3, 3), ConvKernel(half, 3, 3, 3)};
    g = f;
    net.blocks.push_back({f, g});
  }
  return net;
}

}  // namespace

// ---------------------------------------------------------------- Taylor

TEST(Taylor, OrderZeroIsMapping) {
  SeededRng rng(1);
  const TaylorNet net = make_taylor_net(rng, 1, 4, 2, 3, 3, InitScheme::Kaiming);
  const Tensor y = random_tensor(rng, {1, 1, 6, 6});
  EXPECT_EQ(taylor_forward(net, y, 0), net.mapping.forward(y));
}

TEST(Taylor, OrderTwoUnrolled) {
  SeededRng rng(2);
  const TaylorNet net = make_taylor_net(rng, 1, 4, 2, 3, 2, InitScheme::Kaiming);
  const Tensor y = random_tensor(rng, {2, 1, 5, 5});
  const Tensor f = net.mapping.forward(y);
  const Tensor g1 = net.derivative.forward(channel_concat(f, y));
  const Tensor g2 = net.derivative.forward(channel_concat(g1, y));
  const Tensor oracle = f + g1 + g2 * 0.5;
  EXPECT_LT(max_abs_diff(taylor_forward(net, y, 2), oracle), 1e-12);
}

TEST(Taylor, ConsecutiveOrdersDifferByScaledTerm) {
  SeededRng rng(3);
  const TaylorNet net = make_taylor_net(rng, 1, 4, 2, 3, 6, InitScheme::Kaiming);
  const Tensor y = random_tensor(rng, {1, 1, 6, 6});
  const auto terms = taylor_terms(net, y, 6);
  double fact = 1.0;
  for (std::size_t n = 1; n <= 6; ++n) {
    fact *= static_cast<double>(n);
    const Tensor diff = taylor_forward(net, y, n) - taylor_forward(net, y, n - 1);
    EXPECT_LT(max_abs_diff(diff, terms[n] * (1.0 / fact)), 1e-12) << "n=" << n;
  }
  // order 5 vs 4 with the 1/120 factor spelled out
  EXPECT_LT(max_abs_diff(taylor_forward(net, y, 5) - taylor_forward(net, y, 4), terms[5] * (1.0 / 120.0)), 1e-12);
}

TEST(Taylor, ChannelMismatchRejected) {
  SeededRng rng(4);
  const TaylorNet net = make_taylor_net(rng, 1, 4, 2, 3, 2, InitScheme::Kaiming);
  EXPECT_THROW(taylor_forward(net, Tensor({1, 2, 4, 4})), ShapeError);
}

TEST(Taylor, VjpMatchesFiniteDifferences) {
  SeededRng rng(5);
  const TaylorNet net = make_taylor_net(rng, 1, 3, 2, 3, 3, InitScheme::Kaiming);
  const Tensor y = random_tensor(rng, {1, 1, 4, 4});
  const Tensor u = random_tensor(rng, {1, 3, 4, 4});
  const Tensor fd = finite_diff_grad([&](const Tensor& t) { return dot(taylor_forward(net, t), u); }, y);
  EXPECT_LT(relative_error(taylor_vjp(net, y, 3, u), fd), 1e-5);
}

TEST(Taylor, SharedDerivativeWeights) {
  // The derivative part is one stack reused at every order: changing it changes every g^k.
  SeededRng rng(6);
  TaylorNet net = make_taylor_net(rng, 1, 3, 1, 3, 3, InitScheme::Kaiming);
  const Tensor y = random_tensor(rng, {1, 1, 4, 4});
  const auto before = taylor_terms(net, y, 3);
  net.derivative.layers[0].weights *= 2.0;
  const auto after = taylor_terms(net, y, 3);
  EXPECT_EQ(before[0], after[0]);
  for (std::size_t k = 1; k <= 3; ++k) EXPECT_NE(before[k], after[k]);
}

// ---------------------------------------------------------------- INN

TEST(Inn, ZeroSubnetsGiveIdentityCoupling) {
  SeededRng rng(7);
  const InnNet net = zero_inn(2, 2);
  const Tensor x = random_tensor(rng, {1, 1, 4, 4});
  EXPECT_EQ(inn_forward(net, x), space_to_depth(x));
  const Tensor y = random_tensor(rng, {1, 4, 2, 2});
  EXPECT_EQ(inn_inverse(net, y), depth_to_space(y));
  EXPECT_NEAR(inn_jacobian_det(net, x), 1.0, 1e-8);
}

TEST(Inn, HandEvaluatedCoupling) {
  InnNet net;
  net.blocks.push_back({single_layer(identity_kernel(1, 1)), single_layer(identity_kernel(1, 1))});
  const Tensor z({1, 2, 1, 1}, std::vector<double>{1.0, 2.0});
  const Tensor y = inn_coupling_forward(net, z);
  EXPECT_EQ(y, Tensor({1, 2, 1, 1}, std::vector<double>{3.0, 5.0}));
  EXPECT_EQ(inn_coupling_inverse(net, y), z);
}

TEST(Inn, RoundTrip) {
  SeededRng rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    const InnNet net = make_inn_net(rng, 4, 8, 1 + rng.below(3), 2, 3, InitScheme::Kaiming);
    const Tensor x = random_tensor(rng, {1, 1, 8, 8});
    EXPECT_LT(max_abs_diff(inn_inverse(net, inn_forward(net, x)), x), 1e-10);
  }
}

TEST(Inn, Errors) {
  SeededRng rng(9);
  const InnNet net = make_inn_net(rng, 4, 4, 1, 2, 3, InitScheme::Kaiming);
  EXPECT_THROW(inn_forward(net, Tensor({1, 1, 3, 4})), ShapeError);
  EXPECT_THROW(inn_inverse(net, Tensor({1, 2, 2, 2})), ShapeError);
  EXPECT_THROW(inn_jacobian_det(net, Tensor({1, 1, 10, 10})), ShapeError);
  EXPECT_THROW(make_inn_net(rng, 3, 4, 1, 2, 3, InitScheme::Kaiming), ShapeError);
}

TEST(Inn, JacobianDeterminantIsOne) {
  SeededRng rng(10);
  // one block on a 1x1 grid after space_to_depth
  const InnNet one = make_inn_net(rng, 4, 6, 1, 2, 1, InitScheme::Kaiming);
  EXPECT_NEAR(inn_jacobian_det(one, random_tensor(rng, {1, 1, 2, 2})), 1.0, 1e-4);
  const InnNet two = make_inn_net(rng, 4, 6, 2, 2, 3, InitScheme::Kaiming);
  EXPECT_NEAR(inn_jacobian_det(two, random_tensor(rng, {1, 1, 4, 4})), 1.0, 1e-4);
}

TEST(Inn, VjpMatchesFiniteDifferences) {
  SeededRng rng(11);
  const InnNet net = make_inn_net(rng, 4, 4, 2, 2, 3, InitScheme::Kaiming);
  const Tensor x = random_tensor(rng, {1, 1, 4, 4});
  const Tensor u = random_tensor(rng, {1, 4, 2, 2});
  const Tensor fd = finite_diff_grad([&](const Tensor& t) { return dot(inn_forward(net, t), u); }, x);
  EXPECT_LT(relative_error(inn_vjp(net, x, u), fd), 1e-5);
}

TEST(Determinant, KnownMatrices) {
  EXPECT_DOUBLE_EQ(determinant({2, 0, 0, 3}, 2), 6.0);
  EXPECT_DOUBLE_EQ(determinant({0, 1, 1, 0}, 2), -1.0);
  EXPECT_DOUBLE_EQ(determinant({1, 2, 2, 4}, 2), 0.0);
  EXPECT_NEAR(determinant({2, -1, 0, -1, 2, -1, 0, -1, 2}, 3), 4.0, 1e-12);
  EXPECT_THROW(determinant({1, 2, 3}, 2), std::invalid_argument);
}

// ---------------------------------------------------------------- CDC

TEST(Cdc, TwoFormsAgree) {
  SeededRng rng(12);
  for (double theta : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    const Tensor x = random_tensor(rng, {1, 2, 6, 5});
    const ConvKernel k = random_kernel(rng, 3, 2, 3);
    ConvKernel nob = k;
    nob.bias.clear();
    Tensor mixture = cdc_explicit(x, k) * theta + conv2d(x, nob) * (1.0 - theta);
    for (std::size_t o = 0; o < 3; ++o)
      for (std::size_t p = 0; p < 30; ++p) mixture.plane(0, o)[p] += k.bias[o];
    EXPECT_LT(max_abs_diff(cdc_layer(x, k, theta), mixture), 1e-12) << theta;
  }
}

TEST(Cdc, ConstantInputAnnihilatedAtThetaOne) {
  SeededRng rng(13);
  const ConvKernel k = random_kernel(rng, 2, 1, 3, false);
  const Tensor x({1, 1, 7, 7}, 0.37);
  const Tensor y = cdc_layer(x, k, 1.0);
  for (std::size_t o = 0; o < 2; ++o)
    for (std::size_t py = 1; py < 6; ++py)
      for (std::size_t px = 1; px < 6; ++px) EXPECT_NEAR(y.at(0, o, py, px), 0.0, 1e-12);
}

// ---------------------------------------------------------------- Reverse

TEST(Gaussian, DeltaLimitAndNormalization) {
  const Tensor d = gaussian_taps(0.1);
  EXPECT_EQ(d.shape().h, 3u);
  EXPECT_GT(d.at(0, 0, 1, 1), 0.999);
  for (double s : {0.1, 0.5, 1.0, 2.0, 3.3}) {
    const Tensor t = gaussian_taps(s);
    EXPECT_EQ(t.shape().h, 2 * static_cast<std::size_t>(std::ceil(3 * s)) + 1);
    double sum = 0.0;
    for (double v : t.values()) {
      EXPECT_GT(v, 0.0);
      sum += v;
    }
    EXPECT_NEAR(sum, 1.0, 1e-12);
  }
}

TEST(Gaussian, Symmetric) {
  const Tensor t = gaussian_taps(1.0);
  const std::size_t n = t.shape().h;
  for (std::size_t y = 0; y < n; ++y)
    for (std::size_t x = 0; x < n; ++x) {
      EXPECT_EQ(t.at(0, 0, y, x), t.at(0, 0, y, n - 1 - x));
      EXPECT_EQ(t.at(0, 0, y, x), t.at(0, 0, n - 1 - y, x));
      EXPECT_EQ(t.at(0, 0, y, x), t.at(0, 0, x, y));
    }
}

TEST(Gaussian, NonPositiveSigmaRejected) {
  EXPECT_THROW(gaussian_taps(0.0), std::invalid_argument);
  EXPECT_THROW(gaussian_bank({1.0, -1.0}), std::invalid_argument);
}

TEST(Reverse, MixWeightsAreConvex) {
  SeededRng rng(14);
  const ReverseNet net = make_reverse_net(rng, {0.5, 1.0, 2.0}, 5);
  double sum = 0.0;
  for (double w : net.mix_weights) {
    EXPECT_GT(w, 0.0);
    sum += w;
  }
  EXPECT_NEAR(sum, 1.0, 1e-12);
}

TEST(Reverse, ConstantImageIsFixedPoint) {
  SeededRng rng(15);
  const ReverseNet net = make_reverse_net(rng, {0.5, 1.0, 2.0}, 5);
  const Tensor y({1, 1, 8, 8}, 0.42);
  for (std::size_t k = 1; k <= 5; ++k) EXPECT_LT(max_abs_diff(reverse_filter(net, y, k), y), 1e-14);
}

TEST(Reverse, RecoversPreImage) {
  SeededRng rng(16);
  ReverseNet net{{0.5, 1.0, 2.0}, {1.0 / 3, 1.0 / 3, 1.0 / 3}, 20};
  Tensor x_true = random_tensor(rng, {1, 1, 16, 16}, 0.0, 1.0);
  x_true = depthwise_conv2d(x_true, gaussian_taps(0.7), Padding::Circular);  // natural-image-like spectrum
  const Tensor y = apply_smoother(net, x_true);
  double prev = l2(reverse_filter(net, y, 1) - x_true);
  const double first = prev;
  for (std::size_t k = 2; k <= 20; ++k) {
    const double e = l2(reverse_filter(net, y, k) - x_true);
    EXPECT_LE(e, prev + 1e-15);
    prev = e;
  }
  EXPECT_LE(prev * 2.0, first);
}

TEST(Reverse, IterateRatiosBoundedByContraction) {
  SeededRng rng(17);
  const ReverseNet net = make_reverse_net(rng, {0.5, 1.0, 2.0}, 5);
  const ContractionReport c = contraction_coefficient(net, 16, 16);
  ASSERT_TRUE(c.contractive);
  const Tensor y = random_tensor(rng, {1, 1, 16, 16});
  Tensor prev = y, cur = reverse_filter(net, y, 1);
  double prev_step = l2(cur - prev);
  for (std::size_t k = 2; k <= 15; ++k) {
    const Tensor next = reverse_filter(net, y, k);
    const double step = l2(next - cur);
    EXPECT_LE(step / prev_step, c.coefficient + 1e-6);
    prev_step = step;
    cur = next;
  }
}

TEST(Contraction, DeltaAndDefaultBankAndBox) {
  EXPECT_LT(contraction_coefficient(gaussian_taps(0.1), 16, 16).coefficient, 1e-3);
  ReverseNet def{{0.5, 1.0, 2.0}, {1.0 / 3, 1.0 / 3, 1.0 / 3}, 5};
  const ContractionReport c = contraction_coefficient(def, 16, 16);
  EXPECT_TRUE(c.contractive);
  EXPECT_LT(c.coefficient, 1.0);
  // 5x5 box: the DFT has negative eigenvalues, so |1 - lambda| > 1 somewhere.
  const ContractionReport box = contraction_coefficient(Tensor({1, 1, 5, 5}, 1.0 / 25), 16, 16);
  EXPECT_GE(box.coefficient, 1.0);
  EXPECT_FALSE(box.contractive);
}

TEST(Contraction, Errors) {
  EXPECT_THROW(contraction_coefficient(gaussian_taps(1.0), 8, 8, Padding::Zero), std::invalid_argument);
  EXPECT_THROW(contraction_coefficient(Tensor({1, 1, 2, 2}), 8, 8), ShapeError);
}

TEST(Reverse, VjpMatchesFiniteDifferences) {
  SeededRng rng(18);
  const ReverseNet net = make_reverse_net(rng, {0.5, 1.0}, 4);
  const Tensor y = random_tensor(rng, {1, 2, 5, 5});
  const Tensor u = random_tensor(rng, {1, 2, 5, 5});
  const Tensor fd = finite_diff_grad([&](const Tensor& t) { return dot(reverse_filter(net, t), u); }, y);
  EXPECT_LT(relative_error(reverse_filter_vjp(net, y, 4, u), fd), 1e-6);
}

// ---------------------------------------------------------------- dispatcher

TEST(Dispatcher, CdcDepthOneThetaZeroIsConv) {
  RandomNetConfig cfg;
  cfg.kind = ManifoldKind::Cdc;
  cfg.theta = 0.0;
  cfg.depth = 1;
  const LossNetwork net = build_network(cfg, 1, 99);
  SeededRng rng(19);
  const Tensor y = random_tensor(rng, {1, 1, 6, 6});
  EXPECT_EQ(manifold_forward(cfg, net, y), conv2d(y, std::get<CdcNet>(net).stack.layers[0]));
}

TEST(Dispatcher, ReverseOneStep) {
  RandomNetConfig cfg;
  cfg.kind = ManifoldKind::Reverse;
  cfg.iterations_k = 1;
  const LossNetwork net = build_network(cfg, 1, 5);
  SeededRng rng(20);
  const Tensor y = random_tensor(rng, {1, 1, 8, 8});
  const Tensor expect = y * 2.0 - apply_smoother(std::get<ReverseNet>(net), y);
  EXPECT_LT(max_abs_diff(manifold_forward(cfg, net, y), expect), 1e-15);
}

TEST(Dispatcher, DeterministicForEveryKind) {
  SeededRng rng(21);
  const Tensor y = random_tensor(rng, {1, 1, 8, 8});
  for (ManifoldKind kind : {ManifoldKind::Taylor, ManifoldKind::Inn, ManifoldKind::Cdc, ManifoldKind::Reverse}) {
    RandomNetConfig cfg;
    cfg.kind = kind;
    cfg.channels = 4;
    const Tensor a = manifold_forward(cfg, build_network(cfg, 1, 3), y);
    const Tensor b = manifold_forward(cfg, build_network(cfg, 1, 3), y);
    EXPECT_EQ(a, b) << to_string(kind);
    EXPECT_NE(a, manifold_forward(cfg, build_network(cfg, 1, 4), y)) << to_string(kind);
  }
}

TEST(Dispatcher, KindMismatchRejected) {
  RandomNetConfig cdc;
  RandomNetConfig rev;
  rev.kind = ManifoldKind::Reverse;
  EXPECT_THROW(manifold_forward(rev, build_network(cdc, 1, 0), Tensor({1, 1, 4, 4})), std::invalid_argument);
}

TEST(RandomNetConfig, Validation) {
  RandomNetConfig c;
  c.theta = 1.5;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.kernel = 4;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.iterations_k = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.kind = ManifoldKind::Reverse;
  c.sigmas = {};
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c.sigmas = {1.0, 0.0};
  EXPECT_THROW(c.validate(), std::invalid_argument);
  EXPECT_THROW(parse_manifold_kind("unet"), std::invalid_argument);
}

TEST(Dispatcher, VjpForEveryKind) {
  SeededRng rng(22);
  const Tensor y = random_tensor(rng, {1, 1, 4, 4});
  for (ManifoldKind kind : {ManifoldKind::Taylor, ManifoldKind::Inn, ManifoldKind::Cdc, ManifoldKind::Reverse}) {
    RandomNetConfig cfg;
    cfg.kind = kind;
    cfg.channels = 3;
    cfg.depth = 2;
    const LossNetwork net = build_network(cfg, 1, 11);
    const Tensor u = random_tensor(rng, network_forward(net, y).shape());
    const Tensor fd = finite_diff_grad([&](const Tensor& t) { return dot(network_forward(net, t), u); }, y);
    EXPECT_LT(relative_error(network_vjp(net, y, u), fd), 1e-5) << to_string(kind);
  }
}
