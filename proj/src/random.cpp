#include "rwprior/random.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rwprior {

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t SeededRng::next_u64() {
  state_ += 0x9E3779B97F4A7C15ULL;
  return mix64(state_);
}

double SeededRng::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

std::uint64_t SeededRng::below(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("SeededRng::below: bound must be positive");
  // Rejection keeps the draw unbiased.
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
  std::uint64_t v;
  do v = next_u64();
  while (v >= limit);
  return v % bound;
}

double SeededRng::normal() {
  if (spare_) {
    const double v = *spare_;
    spare_.reset();
    return v;
  }
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(a);
  return r * std::cos(a);
}

std::vector<double> normal_sample(SeededRng& rng, std::size_t n) {
  std::vector<double> out(n);
  for (double& v : out) v = rng.normal();
  return out;
}

double init_std(InitScheme scheme, std::size_t out_channels, std::size_t in_channels, std::size_t kh,
                std::size_t kw) {
  const auto fan_in = static_cast<double>(in_channels * kh * kw);
  const auto fan_out = static_cast<double>(out_channels * kh * kw);
  return scheme == InitScheme::Kaiming ? std::sqrt(2.0 / fan_in) : std::sqrt(2.0 / (fan_in + fan_out));
}

ConvKernel init_kernel(SeededRng& rng, std::size_t out_channels, std::size_t in_channels, std::size_t kh,
                       std::size_t kw, InitScheme scheme, bool with_bias) {
  ConvKernel k(out_channels, in_channels, kh, kw, with_bias);
  k.validate();
  const double sd = init_std(scheme, out_channels, in_channels, kh, kw);
  for (double& v : k.weights.values()) v = sd * rng.normal();
  return k;
}

std::uint64_t derive_epoch_seed(std::uint64_t base_seed, std::uint64_t net_index, std::uint64_t epoch) {
  std::uint64_t h = mix64(base_seed);
  h = mix64(h ^ (net_index * 0xD6E8FEB86659FD93ULL + 1));
  return mix64(h ^ (epoch * 0xA0761D6478BD642FULL + 2));
}

const char* to_string(InitScheme s) { return s == InitScheme::Kaiming ? "kaiming" : "xavier"; }

const char* to_string(ReinitPolicy p) {
  switch (p) {
    case ReinitPolicy::Once: return "once";
    case ReinitPolicy::EachEpoch: return "epoch";
    case ReinitPolicy::EachStep: return "step";
  }
  return "once";
}

InitScheme parse_init_scheme(const std::string& s) {
  if (s == "kaiming") return InitScheme::Kaiming;
  if (s == "xavier") return InitScheme::Xavier;
  throw std::invalid_argument("unknown init scheme '" + s + "' (expected kaiming or xavier)");
}

ReinitPolicy parse_reinit_policy(const std::string& s) {
  if (s == "once") return ReinitPolicy::Once;
  if (s == "epoch") return ReinitPolicy::EachEpoch;
  if (s == "step") return ReinitPolicy::EachStep;
  throw std::invalid_argument("unknown reinit policy '" + s + "' (expected once, epoch or step)");
}

}  // namespace rwprior
