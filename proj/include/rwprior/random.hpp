#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rwprior/conv.hpp"

namespace rwprior {

/// SplitMix64 generator.
///
///   state += 0x9E3779B97F4A7C15
///   z = state
///   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
///   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
///   return z ^ (z >> 31)
///
/// Uniform doubles take the top 53 bits: (next() >> 11) * 2^-53, in [0, 1).
/// Standard normals use the Box-Muller transform on (1 - u1, u2), emitting
/// the cosine branch first and caching the sine branch for the next call.
class SeededRng {
public:
  explicit SeededRng(std::uint64_t seed = 0) : seed_(seed), state_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64();
  double uniform();
  /// Uniform integer in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound);
  double normal();

private:
  std::uint64_t seed_;
  std::uint64_t state_;
  std::optional<double> spare_;
};

/// The SplitMix64 output function applied to a single word.
std::uint64_t mix64(std::uint64_t z);

enum class InitScheme { Kaiming, Xavier };

/// Once: drawn a single time before training. EachEpoch ("epochR"): redrawn at
/// every epoch start. EachStep: redrawn before every optimizer step.
enum class ReinitPolicy { Once, EachEpoch, EachStep };

std::vector<double> normal_sample(SeededRng& rng, std::size_t n);

/// Standard deviation for a kernel of the given shape:
/// Kaiming sqrt(2 / fan_in), Xavier sqrt(2 / (fan_in + fan_out)),
/// fan_in = in * kh * kw, fan_out = out * kh * kw.
double init_std(InitScheme scheme, std::size_t out_channels, std::size_t in_channels, std::size_t kh,
                std::size_t kw);

/// Gaussian weights with init_std; zero bias.
ConvKernel init_kernel(SeededRng& rng, std::size_t out_channels, std::size_t in_channels, std::size_t kh,
                       std::size_t kw, InitScheme scheme, bool with_bias = true);

/// mix64(mix64(mix64(base) ^ (net_index * K1 + 1)) ^ (epoch * K2 + 2)), with
/// K1 = 0xD6E8FEB86659FD93 and K2 = 0xA0761D6478BD642F.
std::uint64_t derive_epoch_seed(std::uint64_t base_seed, std::uint64_t net_index, std::uint64_t epoch);

const char* to_string(InitScheme s);
const char* to_string(ReinitPolicy p);
InitScheme parse_init_scheme(const std::string& s);
ReinitPolicy parse_reinit_policy(const std::string& s);

}  // namespace rwprior
