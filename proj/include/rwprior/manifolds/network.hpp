#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "rwprior/manifolds/cdc.hpp"
#include "rwprior/manifolds/inn.hpp"
#include "rwprior/manifolds/reverse.hpp"
#include "rwprior/manifolds/taylor.hpp"

namespace rwprior {

enum class ManifoldKind { Taylor, Inn, Cdc, Reverse };

/// Full description of one fixed-weight loss network.
///
/// `depth` is the layer count of each conv sub-network for Taylor (F and G)
/// and CDC, and the number of coupling blocks for INN (each F and G there is
/// a two-layer stack). `seed` is added to the run's base seed before per-net
/// seeds are derived; leave it at 0 to let the net index alone separate nets.
struct RandomNetConfig {
  ManifoldKind kind = ManifoldKind::Cdc;
  std::size_t depth = 3;
  std::size_t channels = 16;
  std::size_t kernel = 3;
  double theta = 0.7;
  std::size_t order_n = 3;
  std::size_t iterations_k = 5;
  std::vector<double> sigmas{0.5, 1.0, 2.0};
  InitScheme init = InitScheme::Kaiming;
  ReinitPolicy reinit = ReinitPolicy::Once;
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
  bool operator==(const RandomNetConfig&) const = default;
};

using LossNetwork = std::variant<TaylorNet, InnNet, CdcNet, ReverseNet>;

/// Layers per INN translation sub-network.
inline constexpr std::size_t kInnSubnetDepth = 2;

/// Draws every weight of the configured network from SeededRng(seed).
LossNetwork build_network(const RandomNetConfig& cfg, std::size_t image_channels, std::uint64_t seed);

ManifoldKind kind_of(const LossNetwork& net);

/// Feature map of the network; pure and deterministic.
Tensor network_forward(const LossNetwork& net, const Tensor& y);
/// Gradient of <upstream, network_forward(net, y)> with respect to y.
Tensor network_vjp(const LossNetwork& net, const Tensor& y, const Tensor& upstream);

/// Routes to the manifold named by cfg.kind, using cfg's order / iteration count.
Tensor manifold_forward(const RandomNetConfig& cfg, const LossNetwork& net, const Tensor& y);

const char* to_string(ManifoldKind k);
ManifoldKind parse_manifold_kind(const std::string& s);

}  // namespace rwprior
