#include "rwprior/harness/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace rwprior {

namespace {

constexpr std::size_t kWindow = 11;
constexpr double kWindowSigma = 1.5;
constexpr double kC1 = 0.01 * 0.01;
constexpr double kC2 = 0.03 * 0.03;

std::array<double, kWindow * kWindow> ssim_window() {
  std::array<double, kWindow * kWindow> w{};
  double sum = 0.0;
  constexpr auto r = static_cast<double>(kWindow / 2);
  for (std::size_t y = 0; y < kWindow; ++y)
    for (std::size_t x = 0; x < kWindow; ++x) {
      const double dy = static_cast<double>(y) - r, dx = static_cast<double>(x) - r;
      sum += w[y * kWindow + x] = std::exp(-(dx * dx + dy * dy) / (2.0 * kWindowSigma * kWindowSigma));
    }
  for (double& v : w) v /= sum;
  return w;
}

}  // namespace

double psnr(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "psnr");
  if (a.empty()) throw ShapeError("psnr: empty tensors");
  double mse = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    mse += d * d;
  }
  mse /= static_cast<double>(a.size());
  if (mse < 1e-10) return kPsnrCap;
  return std::min(kPsnrCap, 10.0 * std::log10(1.0 / mse));
}

double ssim(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "ssim");
  const Shape s = a.shape();
  if (s.h < kWindow || s.w < kWindow)
    throw ShapeError("ssim: image " + to_string(s) + " is smaller than the 11x11 window");
  if (s.n * s.c == 0) throw ShapeError("ssim: empty tensors");
  static const auto window = ssim_window();

  double total = 0.0;
  std::size_t positions = 0;
  for (std::size_t n = 0; n < s.n; ++n)
    for (std::size_t c = 0; c < s.c; ++c) {
      const double* pa = a.plane(n, c);
      const double* pb = b.plane(n, c);
      for (std::size_t y0 = 0; y0 + kWindow <= s.h; ++y0)
        for (std::size_t x0 = 0; x0 + kWindow <= s.w; ++x0) {
          double ma = 0, mb = 0, saa = 0, sbb = 0, sab = 0;
          for (std::size_t y = 0; y < kWindow; ++y)
            for (std::size_t x = 0; x < kWindow; ++x) {
              const double w = window[y * kWindow + x];
              const double va = pa[(y0 + y) * s.w + x0 + x];
              const double vb = pb[(y0 + y) * s.w + x0 + x];
              ma += w * va;
              mb += w * vb;
              saa += w * va * va;
              sbb += w * vb * vb;
              sab += w * va * vb;
            }
          const double var_a = saa - ma * ma;
          const double var_b = sbb - mb * mb;
          const double cov = sab - ma * mb;
          total += ((2 * ma * mb + kC1) * (2 * cov + kC2)) / ((ma * ma + mb * mb + kC1) * (var_a + var_b + kC2));
          ++positions;
        }
    }
  return total / static_cast<double>(positions);
}

}  // namespace rwprior
