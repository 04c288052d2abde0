#include "rwprior/manifolds/reverse.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <string>

namespace rwprior {

void ReverseNet::validate() const {
  if (sigmas.empty()) throw std::invalid_argument("reverse filter needs at least one sigma");
  for (double s : sigmas)
    if (!(s > 0.0)) throw std::invalid_argument("gaussian sigma must be positive, got " + std::to_string(s));
  if (mix_weights.size() != sigmas.size())
    throw std::invalid_argument("reverse filter needs one mix weight per sigma");
  if (iterations < 1) throw std::invalid_argument("reverse filter needs at least one iteration");
}

Tensor gaussian_taps(double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("gaussian sigma must be positive, got " + std::to_string(sigma));
  const auto radius = static_cast<std::ptrdiff_t>(std::ceil(3.0 * sigma));
  const auto side = static_cast<std::size_t>(2 * radius + 1);
  Tensor taps({1, 1, side, side});
  double sum = 0.0;
  for (std::ptrdiff_t y = -radius; y <= radius; ++y)
    for (std::ptrdiff_t x = -radius; x <= radius; ++x) {
      const double v = std::exp(-static_cast<double>(x * x + y * y) / (2.0 * sigma * sigma));
      taps.at(0, 0, y + radius, x + radius) = v;
      sum += v;
    }
  taps *= 1.0 / sum;
  return taps;
}

std::vector<ConvKernel> gaussian_bank(const std::vector<double>& sigmas) {
  std::vector<ConvKernel> bank;
  bank.reserve(sigmas.size());
  for (double s : sigmas) bank.emplace_back(gaussian_taps(s), std::vector<double>{});
  return bank;
}

Tensor ReverseNet::mixed_taps() const {
  validate();
  std::size_t side = 1;
  std::vector<Tensor> bank;
  for (double s : sigmas) {
    bank.push_back(gaussian_taps(s));
    side = std::max(side, bank.back().shape().h);
  }
  Tensor mixed({1, 1, side, side});
  for (std::size_t j = 0; j < bank.size(); ++j) {
    const std::size_t off = (side - bank[j].shape().h) / 2;
    for (std::size_t y = 0; y < bank[j].shape().h; ++y)
      for (std::size_t x = 0; x < bank[j].shape().w; ++x)
        mixed.at(0, 0, y + off, x + off) += mix_weights[j] * bank[j].at(0, 0, y, x);
  }
  return mixed;
}

Tensor apply_smoother(const ReverseNet& net, const Tensor& x) {
  return depthwise_conv2d(x, net.mixed_taps(), net.padding);
}

Tensor reverse_filter(const ReverseNet& net, const Tensor& y, std::size_t iterations) {
  if (iterations < 1) throw std::invalid_argument("reverse filter needs at least one iteration");
  const Tensor taps = net.mixed_taps();
  Tensor x = y;
  for (std::size_t k = 0; k < iterations; ++k) {
    Tensor next = x + y;
    next -= depthwise_conv2d(x, taps, net.padding);
    x = std::move(next);
  }
  return x;
}

Tensor reverse_filter_vjp(const ReverseNet& net, const Tensor& y, std::size_t iterations, const Tensor& upstream) {
  if (iterations < 1) throw std::invalid_argument("reverse filter needs at least one iteration");
  require_same_shape(y, upstream, "reverse_filter_vjp");
  const Tensor taps = net.mixed_taps();
  // The iteration is affine in (x^k, y): x^(k+1) = (I - f) x^k + y, x^0 = y.
  Tensor grad_x = upstream;
  Tensor grad_y(y.shape());
  for (std::size_t k = 0; k < iterations; ++k) {
    grad_y += grad_x;
    grad_x -= depthwise_conv2d_input_grad(taps, grad_x, net.padding);
  }
  grad_y += grad_x;
  return grad_y;
}

ContractionReport contraction_coefficient(const Tensor& taps, std::size_t h, std::size_t w, Padding padding) {
  if (padding != Padding::Circular)
    throw std::invalid_argument("contraction_coefficient: only circular padding is diagonalized by the DFT");
  if (h == 0 || w == 0) throw ShapeError("contraction_coefficient: empty grid");
  const Shape s = taps.shape();
  if (s.n != 1 || s.c != 1 || s.h % 2 == 0 || s.w % 2 == 0)
    throw ShapeError("contraction_coefficient: taps must have shape (1, 1, odd, odd), got " + to_string(s));
  const auto ry = static_cast<std::ptrdiff_t>(s.h / 2);
  const auto rx = static_cast<std::ptrdiff_t>(s.w / 2);
  const double two_pi = 2.0 * std::numbers::pi;
  ContractionReport report;
  for (std::size_t u = 0; u < h; ++u)
    for (std::size_t v = 0; v < w; ++v) {
      // Eigenvalue of the circulant operator y(p) = sum_t k(t) x(p + t).
      std::complex<double> lambda = 0.0;
      for (std::ptrdiff_t dy = -ry; dy <= ry; ++dy)
        for (std::ptrdiff_t dx = -rx; dx <= rx; ++dx) {
          const double phase = two_pi * (static_cast<double>(u) * static_cast<double>(dy) / static_cast<double>(h) +
                                         static_cast<double>(v) * static_cast<double>(dx) / static_cast<double>(w));
          lambda += taps.at(0, 0, dy + ry, dx + rx) * std::polar(1.0, phase);
        }
      report.coefficient = std::max(report.coefficient, std::abs(1.0 - lambda));
    }
  report.contractive = report.coefficient < 1.0;
  return report;
}

ContractionReport contraction_coefficient(const ReverseNet& net, std::size_t h, std::size_t w) {
  return contraction_coefficient(net.mixed_taps(), h, w, net.padding);
}

ReverseNet make_reverse_net(SeededRng& rng, std::vector<double> sigmas, std::size_t iterations) {
  ReverseNet net;
  net.sigmas = std::move(sigmas);
  net.iterations = iterations;
  std::vector<double> logits = normal_sample(rng, net.sigmas.size());
  const double top = logits.empty() ? 0.0 : *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double& l : logits) sum += (l = std::exp(l - top));
  for (double& l : logits) l /= sum;
  net.mix_weights = std::move(logits);
  net.validate();
  return net;
}

}  // namespace rwprior
