#include "rwprior/harness/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "rwprior/random.hpp"

namespace rwprior {

namespace {

// Shape intensities stay inside [kLow, kHigh] so that noise rarely clamps.
constexpr double kLow = 0.15;
constexpr double kHigh = 0.85;

std::uint64_t image_seed(std::uint64_t seed, std::size_t index) { return derive_epoch_seed(seed, index, 0x1A6E); }
std::uint64_t noise_seed(std::uint64_t seed, std::size_t index) { return derive_epoch_seed(seed, index, 0x2015E); }

double level(SeededRng& rng) { return kLow + (kHigh - kLow) * rng.uniform(); }

}  // namespace

void SyntheticDatasetSpec::validate() const {
  if (count < 1) throw std::invalid_argument("count: must be at least 1");
  if (size < 2) throw std::invalid_argument("size: must be at least 2");
  if (!(noise_sigma >= 0.0 && noise_sigma < 1.0)) throw std::invalid_argument("noise_sigma: must lie in [0, 1)");
}

Tensor gen_clean_image(const SyntheticDatasetSpec& spec, std::size_t index) {
  if (index >= spec.total())
    throw std::out_of_range("synthetic image index " + std::to_string(index) + " out of range (dataset has " +
                            std::to_string(spec.total()) + " images)");
  SeededRng rng(image_seed(spec.seed, index));
  const std::size_t n = spec.size;
  const double extent = static_cast<double>(n);
  Tensor img({1, 1, n, n});

  // Background: linear ramp between two levels along a random direction.
  const double a = level(rng);
  const double b = level(rng);
  const double angle = 2.0 * std::numbers::pi * rng.uniform();
  const double dx = std::cos(angle), dy = std::sin(angle);
  for (std::size_t y = 0; y < n; ++y)
    for (std::size_t x = 0; x < n; ++x) {
      const double t = 0.5 + ((static_cast<double>(x) / extent - 0.5) * dx + (static_cast<double>(y) / extent - 0.5) * dy) / std::numbers::sqrt2;
      img.at(0, 0, y, x) = a + (b - a) * std::clamp(t, 0.0, 1.0);
    }

  const std::size_t shapes = 2 + rng.below(4);
  for (std::size_t s = 0; s < shapes; ++s) {
    const double v = level(rng);
    if (rng.uniform() < 0.5) {
      const double x0 = extent * rng.uniform(), y0 = extent * rng.uniform();
      const double w = extent * (0.15 + 0.35 * rng.uniform()), h = extent * (0.15 + 0.35 * rng.uniform());
      for (std::size_t y = 0; y < n; ++y)
        for (std::size_t x = 0; x < n; ++x) {
          const double px = static_cast<double>(x) + 0.5, py = static_cast<double>(y) + 0.5;
          if (px >= x0 && px < x0 + w && py >= y0 && py < y0 + h) img.at(0, 0, y, x) = v;
        }
    } else {
      const double cx = extent * rng.uniform(), cy = extent * rng.uniform();
      const double r = extent * (0.08 + 0.22 * rng.uniform());
      for (std::size_t y = 0; y < n; ++y)
        for (std::size_t x = 0; x < n; ++x) {
          const double px = static_cast<double>(x) + 0.5 - cx, py = static_cast<double>(y) + 0.5 - cy;
          if (px * px + py * py <= r * r) img.at(0, 0, y, x) = v;
        }
    }
  }
  return img;
}

ImagePair gen_synthetic_pair(const SyntheticDatasetSpec& spec, std::size_t index) {
  ImagePair pair;
  pair.clean = gen_clean_image(spec, index);
  pair.noisy = pair.clean;
  if (spec.noise_sigma == 0.0) return pair;
  SeededRng rng(noise_seed(spec.seed, index));
  for (double& v : pair.noisy.values()) v = std::clamp(v + spec.noise_sigma * rng.normal(), 0.0, 1.0);
  return pair;
}

}  // namespace rwprior
