// Row-vectorized convolution kernels parallelized with OpenMP.
//
// Work is split so that every output element is owned by exactly one
// iteration of the parallel loop and accumulated in a fixed order, which
// keeps results bit-identical for any thread count.

#include <algorithm>
#include <atomic>

#include "conv_common.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace rwprior {

namespace {

std::atomic<int> g_threads{1};

using detail::resolve;

/// out[x] += w * in[x + s] for x in [0, W); reads past the row follow `padding`.
inline void shifted_axpy(double* __restrict out, const double* __restrict in, std::ptrdiff_t W,
                         std::ptrdiff_t s, double w, Padding padding) {
  if (padding == Padding::Zero) {
    const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, -s);
    const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(W, W - s);
    for (std::ptrdiff_t x = lo; x < hi; ++x) out[x] += w * in[x + s];
    return;
  }
  const std::ptrdiff_t sm = ((s % W) + W) % W;
  for (std::ptrdiff_t x = 0; x < W - sm; ++x) out[x] += w * in[x + sm];
  for (std::ptrdiff_t x = W - sm; x < W; ++x) out[x] += w * in[x + sm - W];
}

/// sum_x a[x] * in[x + s], same padding rules as shifted_axpy.
inline double shifted_dot(const double* __restrict a, const double* __restrict in, std::ptrdiff_t W,
                          std::ptrdiff_t s, Padding padding) {
  double acc = 0.0;
  if (padding == Padding::Zero) {
    const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, -s);
    const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(W, W - s);
    for (std::ptrdiff_t x = lo; x < hi; ++x) acc += a[x] * in[x + s];
    return acc;
  }
  const std::ptrdiff_t sm = ((s % W) + W) % W;
  for (std::ptrdiff_t x = 0; x < W - sm; ++x) acc += a[x] * in[x + sm];
  for (std::ptrdiff_t x = W - sm; x < W; ++x) acc += a[x] * in[x + sm - W];
  return acc;
}

}  // namespace

void set_kernel_threads(int threads) { g_threads = std::max(1, threads); }
int kernel_threads() { return g_threads; }

Tensor conv2d(const Tensor& x, const ConvKernel& k, Padding padding) {
  detail::check_conv_input(x, k);
  const Shape s = x.shape();
  const auto H = static_cast<std::ptrdiff_t>(s.h);
  const auto W = static_cast<std::ptrdiff_t>(s.w);
  const auto KH = static_cast<std::ptrdiff_t>(k.kh());
  const auto KW = static_cast<std::ptrdiff_t>(k.kw());
  const std::ptrdiff_t ch = KH / 2, cw = KW / 2;
  const auto O = static_cast<std::ptrdiff_t>(k.out_channels());
  const auto C = static_cast<std::ptrdiff_t>(s.c);
  Tensor y({s.n, k.out_channels(), s.h, s.w});
  const std::ptrdiff_t tasks = static_cast<std::ptrdiff_t>(s.n) * O;
  const int threads = g_threads;

#pragma omp parallel for schedule(static) num_threads(threads) if (threads > 1)
  for (std::ptrdiff_t t = 0; t < tasks; ++t) {
    const std::size_t n = t / O, o = t % O;
    double* out = y.plane(n, o);
    std::fill_n(out, s.plane(), k.has_bias() ? k.bias[o] : 0.0);
    for (std::ptrdiff_t i = 0; i < C; ++i) {
      const double* in = x.plane(n, i);
      for (std::ptrdiff_t ky = 0; ky < KH; ++ky)
        for (std::ptrdiff_t py = 0; py < H; ++py) {
          const auto sy = resolve(py + ky - ch, H, padding);
          if (sy < 0) continue;
          for (std::ptrdiff_t kx = 0; kx < KW; ++kx)
            shifted_axpy(out + py * W, in + sy * W, W, kx - cw, k.w(o, i, ky, kx), padding);
        }
    }
  }
  return y;
}

Tensor conv2d_input_grad(const ConvKernel& k, const Tensor& upstream, Padding padding) {
  detail::check_conv_upstream(k, upstream);
  const Shape s = upstream.shape();
  const auto H = static_cast<std::ptrdiff_t>(s.h);
  const auto W = static_cast<std::ptrdiff_t>(s.w);
  const auto KH = static_cast<std::ptrdiff_t>(k.kh());
  const auto KW = static_cast<std::ptrdiff_t>(k.kw());
  const std::ptrdiff_t ch = KH / 2, cw = KW / 2;
  const auto I = static_cast<std::ptrdiff_t>(k.in_channels());
  const auto O = static_cast<std::ptrdiff_t>(k.out_channels());
  Tensor g({s.n, k.in_channels(), s.h, s.w});
  const std::ptrdiff_t tasks = static_cast<std::ptrdiff_t>(s.n) * I;
  const int threads = g_threads;

  // Gather form: grad(q) = sum_t w(t) * upstream(q - offset(t)).
#pragma omp parallel for schedule(static) num_threads(threads) if (threads > 1)
  for (std::ptrdiff_t t = 0; t < tasks; ++t) {
    const std::size_t n = t / I, i = t % I;
    double* out = g.plane(n, i);
    for (std::ptrdiff_t o = 0; o < O; ++o) {
      const double* up = upstream.plane(n, o);
      for (std::ptrdiff_t ky = 0; ky < KH; ++ky)
        for (std::ptrdiff_t py = 0; py < H; ++py) {
          const auto sy = resolve(py - (ky - ch), H, padding);
          if (sy < 0) continue;
          for (std::ptrdiff_t kx = 0; kx < KW; ++kx)
            shifted_axpy(out + py * W, up + sy * W, W, -(kx - cw), k.w(o, i, ky, kx), padding);
        }
    }
  }
  return g;
}

ConvKernel conv2d_kernel_grad(const Tensor& x, const ConvKernel& k, const Tensor& upstream, Padding padding) {
  detail::check_conv_input(x, k);
  detail::check_conv_upstream(k, upstream);
  const Shape s = x.shape();
  if (upstream.shape() != Shape{s.n, k.out_channels(), s.h, s.w})
    throw ShapeError("conv2d_kernel_grad: upstream shape " + to_string(upstream.shape()) +
                     " does not match output shape for input " + to_string(s));
  const auto H = static_cast<std::ptrdiff_t>(s.h);
  const auto W = static_cast<std::ptrdiff_t>(s.w);
  const auto KH = static_cast<std::ptrdiff_t>(k.kh());
  const auto KW = static_cast<std::ptrdiff_t>(k.kw());
  const std::ptrdiff_t ch = KH / 2, cw = KW / 2;
  const auto O = static_cast<std::ptrdiff_t>(k.out_channels());
  const auto C = static_cast<std::ptrdiff_t>(s.c);
  const auto N = static_cast<std::ptrdiff_t>(s.n);
  ConvKernel g(k.out_channels(), k.in_channels(), k.kh(), k.kw(), k.has_bias());
  const int threads = g_threads;

#pragma omp parallel for schedule(static) num_threads(threads) if (threads > 1)
  for (std::ptrdiff_t o = 0; o < O; ++o) {
    if (g.has_bias()) {
      double acc = 0.0;
      for (std::ptrdiff_t n = 0; n < N; ++n) {
        const double* up = upstream.plane(n, o);
        for (std::size_t p = 0; p < s.plane(); ++p) acc += up[p];
      }
      g.bias[o] = acc;
    }
    for (std::ptrdiff_t i = 0; i < C; ++i)
      for (std::ptrdiff_t ky = 0; ky < KH; ++ky)
        for (std::ptrdiff_t kx = 0; kx < KW; ++kx) {
          double acc = 0.0;
          for (std::ptrdiff_t n = 0; n < N; ++n) {
            const double* up = upstream.plane(n, o);
            const double* in = x.plane(n, i);
            for (std::ptrdiff_t py = 0; py < H; ++py) {
              const auto sy = resolve(py + ky - ch, H, padding);
              if (sy < 0) continue;
              acc += shifted_dot(up + py * W, in + sy * W, W, kx - cw, padding);
            }
          }
          g.w(o, i, ky, kx) = acc;
        }
  }
  return g;
}

Tensor depthwise_conv2d(const Tensor& x, const Tensor& taps, Padding padding) {
  detail::check_taps(taps);
  const Shape s = x.shape();
  const auto H = static_cast<std::ptrdiff_t>(s.h);
  const auto W = static_cast<std::ptrdiff_t>(s.w);
  const auto KH = static_cast<std::ptrdiff_t>(taps.shape().h);
  const auto KW = static_cast<std::ptrdiff_t>(taps.shape().w);
  Tensor y(s);
  const auto tasks = static_cast<std::ptrdiff_t>(s.n * s.c);
  const int threads = g_threads;

#pragma omp parallel for schedule(static) num_threads(threads) if (threads > 1)
  for (std::ptrdiff_t t = 0; t < tasks; ++t) {
    const double* in = x.data() + t * s.plane();
    double* out = y.data() + t * s.plane();
    for (std::ptrdiff_t ky = 0; ky < KH; ++ky)
      for (std::ptrdiff_t py = 0; py < H; ++py) {
        const auto sy = resolve(py + ky - KH / 2, H, padding);
        if (sy < 0) continue;
        for (std::ptrdiff_t kx = 0; kx < KW; ++kx)
          shifted_axpy(out + py * W, in + sy * W, W, kx - KW / 2, taps[ky * KW + kx], padding);
      }
  }
  return y;
}

Tensor depthwise_conv2d_input_grad(const Tensor& taps, const Tensor& upstream, Padding padding) {
  detail::check_taps(taps);
  const Shape s = upstream.shape();
  const auto H = static_cast<std::ptrdiff_t>(s.h);
  const auto W = static_cast<std::ptrdiff_t>(s.w);
  const auto KH = static_cast<std::ptrdiff_t>(taps.shape().h);
  const auto KW = static_cast<std::ptrdiff_t>(taps.shape().w);
  Tensor g(s);
  const auto tasks = static_cast<std::ptrdiff_t>(s.n * s.c);
  const int threads = g_threads;

#pragma omp parallel for schedule(static) num_threads(threads) if (threads > 1)
  for (std::ptrdiff_t t = 0; t < tasks; ++t) {
    const double* up = upstream.data() + t * s.plane();
    double* out = g.data() + t * s.plane();
    for (std::ptrdiff_t ky = 0; ky < KH; ++ky)
      for (std::ptrdiff_t py = 0; py < H; ++py) {
        const auto sy = resolve(py - (ky - KH / 2), H, padding);
        if (sy < 0) continue;
        for (std::ptrdiff_t kx = 0; kx < KW; ++kx)
          shifted_axpy(out + py * W, up + sy * W, W, -(kx - KW / 2), taps[ky * KW + kx], padding);
      }
  }
  return g;
}

}  // namespace rwprior
