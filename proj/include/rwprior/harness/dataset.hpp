#pragma once

#include <cstdint>
#include <utility>

#include "rwprior/tensor.hpp"

namespace rwprior {

/// Procedural grayscale images: a linear-gradient background with a few
/// rectangles and disks, plus clamped additive Gaussian noise.
/// Indices [0, count) are training images; [count, count + val_count) validation.
struct SyntheticDatasetSpec {
  std::size_t count = 512;
  std::size_t val_count = 64;
  std::size_t size = 32;
  double noise_sigma = 25.0 / 255.0;
  std::uint64_t seed = 1;

  std::size_t total() const { return count + val_count; }
  void validate() const;
  bool operator==(const SyntheticDatasetSpec&) const = default;
};

struct ImagePair {
  Tensor clean;  // (1, 1, size, size), values in [0, 1]
  Tensor noisy;  // clean + N(0, sigma^2), clamped to [0, 1]
};

/// Deterministic in (spec.seed, index); index < spec.total().
ImagePair gen_synthetic_pair(const SyntheticDatasetSpec& spec, std::size_t index);

/// Clean image only (no noise draw), same content as gen_synthetic_pair.
Tensor gen_clean_image(const SyntheticDatasetSpec& spec, std::size_t index);

}  // namespace rwprior
