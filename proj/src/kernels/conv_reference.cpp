// Serial nested-loop kernels. The input gradient uses the scatter form so it
// checks the gather form of the parallel kernel independently.

#include "conv_common.hpp"

namespace rwprior::reference {

using detail::resolve;

Tensor conv2d(const Tensor& x, const ConvKernel& k, Padding padding) {
  detail::check_conv_input(x, k);
  const Shape s = x.shape();
  const auto H = static_cast<std::ptrdiff_t>(s.h), W = static_cast<std::ptrdiff_t>(s.w);
  const auto ch = static_cast<std::ptrdiff_t>(k.kh() / 2), cw = static_cast<std::ptrdiff_t>(k.kw() / 2);
  Tensor y({s.n, k.out_channels(), s.h, s.w});
  for (std::size_t n = 0; n < s.n; ++n)
    for (std::size_t o = 0; o < k.out_channels(); ++o)
      for (std::ptrdiff_t py = 0; py < H; ++py)
        for (std::ptrdiff_t px = 0; px < W; ++px) {
          double acc = k.has_bias() ? k.bias[o] : 0.0;
          for (std::size_t i = 0; i < s.c; ++i)
            for (std::size_t ky = 0; ky < k.kh(); ++ky)
              for (std::size_t kx = 0; kx < k.kw(); ++kx) {
                const auto sy = resolve(py + static_cast<std::ptrdiff_t>(ky) - ch, H, padding);
                const auto sx = resolve(px + static_cast<std::ptrdiff_t>(kx) - cw, W, padding);
                if (sy < 0 || sx < 0) continue;
                acc += k.w(o, i, ky, kx) * x.at(n, i, sy, sx);
              }
          y.at(n, o, py, px) = acc;
        }
  return y;
}

Tensor conv2d_input_grad(const ConvKernel& k, const Tensor& upstream, Padding padding) {
  detail::check_conv_upstream(k, upstream);
  const Shape s = upstream.shape();
  const auto H = static_cast<std::ptrdiff_t>(s.h), W = static_cast<std::ptrdiff_t>(s.w);
  const auto ch = static_cast<std::ptrdiff_t>(k.kh() / 2), cw = static_cast<std::ptrdiff_t>(k.kw() / 2);
  Tensor g({s.n, k.in_channels(), s.h, s.w});
  for (std::size_t n = 0; n < s.n; ++n)
    for (std::size_t o = 0; o < k.out_channels(); ++o)
      for (std::ptrdiff_t py = 0; py < H; ++py)
        for (std::ptrdiff_t px = 0; px < W; ++px) {
          const double u = upstream.at(n, o, py, px);
          for (std::size_t i = 0; i < k.in_channels(); ++i)
            for (std::size_t ky = 0; ky < k.kh(); ++ky)
              for (std::size_t kx = 0; kx < k.kw(); ++kx) {
                const auto sy = resolve(py + static_cast<std::ptrdiff_t>(ky) - ch, H, padding);
                const auto sx = resolve(px + static_cast<std::ptrdiff_t>(kx) - cw, W, padding);
                if (sy < 0 || sx < 0) continue;
                g.at(n, i, sy, sx) += k.w(o, i, ky, kx) * u;
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
  const auto H = static_cast<std::ptrdiff_t>(s.h), W = static_cast<std::ptrdiff_t>(s.w);
  const auto ch = static_cast<std::ptrdiff_t>(k.kh() / 2), cw = static_cast<std::ptrdiff_t>(k.kw() / 2);
  ConvKernel g(k.out_channels(), k.in_channels(), k.kh(), k.kw(), k.has_bias());
  for (std::size_t n = 0; n < s.n; ++n)
    for (std::size_t o = 0; o < k.out_channels(); ++o)
      for (std::ptrdiff_t py = 0; py < H; ++py)
        for (std::ptrdiff_t px = 0; px < W; ++px) {
          const double u = upstream.at(n, o, py, px);
          if (g.has_bias()) g.bias[o] += u;
          for (std::size_t i = 0; i < s.c; ++i)
            for (std::size_t ky = 0; ky < k.kh(); ++ky)
              for (std::size_t kx = 0; kx < k.kw(); ++kx) {
                const auto sy = resolve(py + static_cast<std::ptrdiff_t>(ky) - ch, H, padding);
                const auto sx = resolve(px + static_cast<std::ptrdiff_t>(kx) - cw, W, padding);
                if (sy < 0 || sx < 0) continue;
                g.w(o, i, ky, kx) += u * x.at(n, i, sy, sx);
              }
        }
  return g;
}

namespace {

ConvKernel depthwise_as_dense(const Tensor& taps, std::size_t channels) {
  detail::check_taps(taps);
  const Shape t = taps.shape();
  ConvKernel k(channels, channels, t.h, t.w, false);
  for (std::size_t c = 0; c < channels; ++c)
    for (std::size_t y = 0; y < t.h; ++y)
      for (std::size_t x = 0; x < t.w; ++x) k.w(c, c, y, x) = taps[y * t.w + x];
  return k;
}

}  // namespace

Tensor depthwise_conv2d(const Tensor& x, const Tensor& taps, Padding padding) {
  return reference::conv2d(x, depthwise_as_dense(taps, x.shape().c), padding);
}

Tensor depthwise_conv2d_input_grad(const Tensor& taps, const Tensor& upstream, Padding padding) {
  return reference::conv2d_input_grad(depthwise_as_dense(taps, upstream.shape().c), upstream, padding);
}

}  // namespace rwprior::reference
