#include <gtest/gtest.h>

#include "rwprior/conv_stack.hpp"
#include "rwprior/gradcheck.hpp"
#include "rwprior/manifolds/cdc.hpp"
#include "test_util.hpp"

using namespace rwprior;
using rwprior::testing::dot;
using rwprior::testing::identity_kernel;
using rwprior::testing::random_kernel;
using rwprior::testing::random_tensor;

namespace {

struct ThreadGuard {
  explicit ThreadGuard(int t) { set_kernel_threads(t); }
  ~ThreadGuard() { set_kernel_threads(1); }
};

constexpr Padding kPaddings[] = {Padding::Zero, Padding::Circular};

}  // namespace

TEST(Conv2d, ZeroInputZeroBias) {
  SeededRng rng(1);
  const ConvKernel k = random_kernel(rng, 2, 3, 3, false);
  const Tensor y = conv2d(Tensor({1, 3, 4, 4}), k);
  for (double v : y.values()) EXPECT_EQ(v, 0.0);
}

TEST(Conv2d, AllOnesOnTwoByTwo) {
  const Tensor x({1, 1, 2, 2}, std::vector<double>{1, 2, 3, 4});
  const ConvKernel k(Tensor({1, 1, 3, 3}, 1.0), {});
  EXPECT_EQ(conv2d(x, k), Tensor({1, 1, 2, 2}, 10.0));
  EXPECT_EQ(reference::conv2d(x, k), Tensor({1, 1, 2, 2}, 10.0));
}

TEST(Conv2d, IdentityKernel) {
  SeededRng rng(2);
  const Tensor x = random_tensor(rng, {2, 3, 5, 4});
  for (Padding p : kPaddings) {
    EXPECT_EQ(conv2d(x, identity_kernel(3, 3), p), x);
    EXPECT_EQ(conv2d(x, identity_kernel(3, 5), p), x);
  }
}

TEST(Conv2d, CircularWraps) {
  // Kernel reading only the left neighbour: circular padding wraps the last column in.
  const Tensor x({1, 1, 1, 3}, std::vector<double>{1, 2, 3});
  ConvKernel k(1, 1, 1, 3, false);
  k.w(0, 0, 0, 0) = 1.0;
  EXPECT_EQ(conv2d(x, k, Padding::Circular), Tensor({1, 1, 1, 3}, std::vector<double>{3, 1, 2}));
  EXPECT_EQ(conv2d(x, k, Padding::Zero), Tensor({1, 1, 1, 3}, std::vector<double>{0, 1, 2}));
}

TEST(Conv2d, KernelLargerThanImage) {
  SeededRng rng(3);
  const Tensor x = random_tensor(rng, {1, 2, 2, 3});
  const ConvKernel k = random_kernel(rng, 2, 2, 7);
  for (Padding p : kPaddings) EXPECT_LT(max_abs_diff(conv2d(x, k, p), reference::conv2d(x, k, p)), 1e-12);
}

TEST(Conv2d, ShapeMismatchNamesBothShapes) {
  const ConvKernel k(2, 3, 3, 3);
  try {
    conv2d(Tensor({1, 2, 4, 4}), k);
    FAIL();
  } catch (const ShapeError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("(1, 2, 4, 4)"), std::string::npos) << msg;
    EXPECT_NE(msg.find("(2, 3, 3, 3)"), std::string::npos) << msg;
  }
}

TEST(ConvKernel, EvenExtentsRejected) {
  EXPECT_THROW(ConvKernel(Tensor({1, 1, 2, 3}), {}), ShapeError);
  EXPECT_THROW(ConvKernel(Tensor({2, 1, 3, 3}), {0.0}), ShapeError);
}

TEST(Conv2d, Linear) {
  SeededRng rng(4);
  const ConvKernel k = random_kernel(rng, 3, 2, 3, false);
  const Tensor x = random_tensor(rng, {2, 2, 5, 5}), z = random_tensor(rng, {2, 2, 5, 5});
  const double a = 0.7, b = -1.3;
  for (Padding p : kPaddings) {
    const Tensor lhs = conv2d(x * a + z * b, k, p);
    const Tensor rhs = conv2d(x, k, p) * a + conv2d(z, k, p) * b;
    EXPECT_LT(max_abs_diff(lhs, rhs), 1e-12);
  }
}

TEST(Conv2dVjp, ZeroUpstream) {
  SeededRng rng(5);
  const Tensor x = random_tensor(rng, {1, 2, 4, 4});
  const ConvKernel k = random_kernel(rng, 3, 2, 3);
  const ConvGrads g = conv2d_vjp(x, k, Tensor({1, 3, 4, 4}));
  for (double v : g.input.values()) EXPECT_EQ(v, 0.0);
  for (double v : g.kernel.weights.values()) EXPECT_EQ(v, 0.0);
  for (double v : g.kernel.bias) EXPECT_EQ(v, 0.0);
}

TEST(Conv2dVjp, IdentityAdjoint) {
  SeededRng rng(6);
  const Tensor up = random_tensor(rng, {1, 2, 4, 4});
  for (Padding p : kPaddings) EXPECT_EQ(conv2d_input_grad(identity_kernel(2, 3), up, p), up);
}

TEST(Conv2dVjp, MatchesFiniteDifferences) {
  SeededRng rng(7);
  for (Padding p : kPaddings) {
    const Tensor x = random_tensor(rng, {1, 1, 4, 4});
    const ConvKernel k = random_kernel(rng, 1, 1, 3);
    const Tensor up = random_tensor(rng, {1, 1, 4, 4});
    const ConvGrads g = conv2d_vjp(x, k, up, p);
    const Tensor fd_x = finite_diff_grad([&](const Tensor& t) { return dot(conv2d(t, k, p), up); }, x);
    EXPECT_LT(relative_error(g.input, fd_x), 1e-6);
    const Tensor fd_w = finite_diff_grad(
        [&](const Tensor& w) { return dot(conv2d(x, ConvKernel(w, k.bias), p), up); }, k.weights);
    EXPECT_LT(relative_error(g.kernel.weights, fd_w), 1e-6);
    double bias_grad = 0.0;
    for (double v : up.values()) bias_grad += v;
    EXPECT_NEAR(g.kernel.bias[0], bias_grad, 1e-12);
  }
}

TEST(Conv2dVjp, AdjointIdentityMultiChannel) {
  // <conv(x), u> == <x, conv^T(u)> on random shapes.
  SeededRng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t C = 1 + rng.below(3), O = 1 + rng.below(3), K = 1 + 2 * rng.below(3);
    const Shape s{1 + rng.below(2), C, 1 + rng.below(6), 1 + rng.below(6)};
    const Padding p = kPaddings[rng.below(2)];
    const Tensor x = random_tensor(rng, s);
    const ConvKernel k = random_kernel(rng, O, C, K, false);
    const Tensor u = random_tensor(rng, {s.n, O, s.h, s.w});
    EXPECT_NEAR(dot(conv2d(x, k, p), u), dot(x, conv2d_input_grad(k, u, p)), 1e-10);
  }
}

TEST(Conv2dVjp, UpstreamShapeRejected) {
  const ConvKernel k(2, 1, 3, 3);
  EXPECT_THROW(conv2d_vjp(Tensor({1, 1, 4, 4}), k, Tensor({1, 2, 4, 3})), ShapeError);
  EXPECT_THROW(conv2d_input_grad(k, Tensor({1, 1, 4, 4})), ShapeError);
}

// The OpenMP kernels against the serial oracle, across thread counts.
TEST(ConvKernels, MatchReferenceAcrossThreadCounts) {
  SeededRng rng(9);
  for (int trial = 0; trial < 12; ++trial) {
    const std::size_t C = 1 + rng.below(4), O = 1 + rng.below(4), K = 1 + 2 * rng.below(3);
    const Shape s{1 + rng.below(3), C, 1 + rng.below(9), 1 + rng.below(9)};
    const Padding p = kPaddings[trial % 2];
    const Tensor x = random_tensor(rng, s);
    const ConvKernel k = random_kernel(rng, O, C, K);
    const Tensor u = random_tensor(rng, {s.n, O, s.h, s.w});
    const Tensor taps = random_tensor(rng, {1, 1, K, K});

    const Tensor ref_y = reference::conv2d(x, k, p);
    const Tensor ref_gx = reference::conv2d_input_grad(k, u, p);
    const ConvKernel ref_gk = reference::conv2d_kernel_grad(x, k, u, p);
    const Tensor ref_dw = reference::depthwise_conv2d(x, taps, p);
    const Tensor ref_dwg = reference::depthwise_conv2d_input_grad(taps, x, p);

    Tensor y1, gx1, dw1, dwg1;
    ConvKernel gk1;
    for (int threads : {1, 2, 3, 8}) {
      ThreadGuard guard(threads);
      const Tensor y = conv2d(x, k, p), gx = conv2d_input_grad(k, u, p);
      const ConvKernel gk = conv2d_kernel_grad(x, k, u, p);
      const Tensor dw = depthwise_conv2d(x, taps, p), dwg = depthwise_conv2d_input_grad(taps, x, p);
      EXPECT_LT(max_abs_diff(y, ref_y), 1e-12);
      EXPECT_LT(max_abs_diff(gx, ref_gx), 1e-12);
      EXPECT_LT(max_abs_diff(gk.weights, ref_gk.weights), 1e-12);
      for (std::size_t o = 0; o < O; ++o) EXPECT_NEAR(gk.bias[o], ref_gk.bias[o], 1e-12);
      EXPECT_LT(max_abs_diff(dw, ref_dw), 1e-12);
      EXPECT_LT(max_abs_diff(dwg, ref_dwg), 1e-12);
      if (threads == 1) {
        y1 = y, gx1 = gx, gk1 = gk, dw1 = dw, dwg1 = dwg;
      } else {
        // Bit-identical regardless of thread count.
        EXPECT_EQ(y, y1);
        EXPECT_EQ(gx, gx1);
        EXPECT_EQ(gk, gk1);
        EXPECT_EQ(dw, dw1);
        EXPECT_EQ(dwg, dwg1);
      }
    }
  }
}

TEST(ConvKernels, ThreadSetting) {
  ThreadGuard guard(4);
  EXPECT_EQ(kernel_threads(), 4);
  set_kernel_threads(0);
  EXPECT_EQ(kernel_threads(), 1);
}

TEST(Depthwise, BadTapsRejected) {
  EXPECT_THROW(depthwise_conv2d(Tensor({1, 1, 3, 3}), Tensor({1, 1, 2, 3}), Padding::Zero), ShapeError);
  EXPECT_THROW(depthwise_conv2d(Tensor({1, 1, 3, 3}), Tensor({2, 1, 3, 3}), Padding::Zero), ShapeError);
}

TEST(ConvStack, BackwardMatchesFiniteDifferences) {
  SeededRng rng(10);
  for (double theta : {0.0, 0.6}) {
    ConvStack s = make_conv_stack(rng, 2, 3, 2, 3, 3, InitScheme::Kaiming, theta);
    for (auto& l : s.layers)
      for (double& b : l.bias) b = 0.05 * rng.normal();
    const Tensor x = random_tensor(rng, {1, 2, 4, 4});
    const Tensor u = random_tensor(rng, {1, 2, 4, 4});
    ConvStack::Trace tr;
    s.forward(x, tr);
    std::vector<ConvKernel> lg;
    const Tensor gx = s.backward(tr, u, lg);
    const Tensor fd = finite_diff_grad([&](const Tensor& t) { return dot(s.forward(t), u); }, x);
    EXPECT_LT(relative_error(gx, fd), 1e-5);
    ASSERT_EQ(lg.size(), s.layers.size());
    // Kernel gradient of the first layer.
    const Tensor fdw = finite_diff_grad(
        [&](const Tensor& w) {
          ConvStack t = s;
          t.layers[0].weights = w;
          return dot(t.forward(x), u);
        },
        s.layers[0].weights);
    EXPECT_LT(relative_error(lg[0].weights, fdw), 1e-5);
  }
}

TEST(ConvStack, LastLayerIsLinear) {
  ConvStack s;
  s.layers.push_back(identity_kernel(1, 1));
  const Tensor x({1, 1, 1, 2}, std::vector<double>{-1.0, 2.0});
  EXPECT_EQ(s.forward(x), x);
}

TEST(Cdc, ThetaZeroIsVanillaBitExact) {
  SeededRng rng(11);
  const Tensor x = random_tensor(rng, {1, 2, 5, 5});
  const ConvKernel k = random_kernel(rng, 3, 2, 3);
  EXPECT_EQ(cdc_layer(x, k, 0.0), conv2d(x, k));
}

TEST(Cdc, ThetaOutOfRangeRejected) {
  const ConvKernel k(1, 1, 3, 3);
  EXPECT_THROW(cdc_layer(Tensor({1, 1, 3, 3}), k, 1.5), std::invalid_argument);
  EXPECT_THROW(cdc_layer(Tensor({1, 1, 3, 3}), k, -0.1), std::invalid_argument);
}

TEST(Cdc, GradientsMatchFiniteDifferences) {
  SeededRng rng(12);
  const Tensor x = random_tensor(rng, {1, 2, 4, 4});
  const ConvKernel k = random_kernel(rng, 2, 2, 3);
  const Tensor u = random_tensor(rng, {1, 2, 4, 4});
  const double theta = 0.4;
  const Tensor fd_x = finite_diff_grad([&](const Tensor& t) { return dot(cdc_layer(t, k, theta), u); }, x);
  EXPECT_LT(relative_error(cdc_layer_input_grad(k, theta, u), fd_x), 1e-6);
  const Tensor fd_w = finite_diff_grad(
      [&](const Tensor& w) { return dot(cdc_layer(x, ConvKernel(w, k.bias), theta), u); }, k.weights);
  EXPECT_LT(relative_error(cdc_layer_kernel_grad(x, k, theta, u).weights, fd_w), 1e-6);
}
