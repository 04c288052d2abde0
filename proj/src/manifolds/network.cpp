#include "rwprior/manifolds/network.hpp"

#include "rwprior/ops.hpp"

namespace rwprior {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

}  // namespace

void RandomNetConfig::validate() const {
  auto fail = [](const std::string& field, const std::string& why) {
    throw std::invalid_argument(field + ": " + why);
  };
  if (depth < 1) fail("depth", "must be at least 1");
  if (channels < 1) fail("channels", "must be at least 1");
  if (kernel < 1 || kernel % 2 == 0) fail("kernel", "must be a positive odd size");
  if (!(theta >= 0.0 && theta <= 1.0)) fail("theta", "must lie in [0, 1]");
  if (iterations_k < 1) fail("iterations_k", "must be at least 1");
  if (kind == ManifoldKind::Reverse) {
    if (sigmas.empty()) fail("sigmas", "must be non-empty for the reverse manifold");
    for (double s : sigmas)
      if (!(s > 0.0)) fail("sigmas", "entries must be positive");
  }
}

LossNetwork build_network(const RandomNetConfig& cfg, std::size_t image_channels, std::uint64_t seed) {
  cfg.validate();
  SeededRng rng(seed);
  switch (cfg.kind) {
    case ManifoldKind::Taylor:
      return make_taylor_net(rng, image_channels, cfg.channels, cfg.depth, cfg.kernel, cfg.order_n, cfg.init);
    case ManifoldKind::Inn:
      return make_inn_net(rng, 4 * image_channels, cfg.channels, cfg.depth, kInnSubnetDepth, cfg.kernel, cfg.init);
    case ManifoldKind::Cdc:
      return CdcNet{make_conv_stack(rng, image_channels, cfg.channels, cfg.channels, cfg.depth, cfg.kernel, cfg.init,
                                    cfg.theta)};
    case ManifoldKind::Reverse:
      return make_reverse_net(rng, cfg.sigmas, cfg.iterations_k);
  }
  throw std::invalid_argument("unknown manifold kind");
}

ManifoldKind kind_of(const LossNetwork& net) {
  return std::visit(overloaded{[](const TaylorNet&) { return ManifoldKind::Taylor; },
                               [](const InnNet&) { return ManifoldKind::Inn; },
                               [](const CdcNet&) { return ManifoldKind::Cdc; },
                               [](const ReverseNet&) { return ManifoldKind::Reverse; }},
                    net);
}

Tensor network_forward(const LossNetwork& net, const Tensor& y) {
  return std::visit(overloaded{[&](const TaylorNet& n) { return taylor_forward(n, y); },
                               [&](const InnNet& n) { return inn_forward(n, y); },
                               [&](const CdcNet& n) { return n.forward(y); },
                               [&](const ReverseNet& n) { return reverse_filter(n, y); }},
                    net);
}

Tensor network_vjp(const LossNetwork& net, const Tensor& y, const Tensor& upstream) {
  return std::visit(
      overloaded{[&](const TaylorNet& n) { return taylor_vjp(n, y, n.order, upstream); },
                 [&](const InnNet& n) { return inn_vjp(n, y, upstream); },
                 [&](const CdcNet& n) {
                   ConvStack::Trace trace;
                   n.stack.forward(y, trace);
                   return n.stack.backward(trace, upstream);
                 },
                 [&](const ReverseNet& n) { return reverse_filter_vjp(n, y, n.iterations, upstream); }},
      net);
}

Tensor manifold_forward(const RandomNetConfig& cfg, const LossNetwork& net, const Tensor& y) {
  if (kind_of(net) != cfg.kind)
    throw std::invalid_argument(std::string("manifold_forward: config kind ") + to_string(cfg.kind) +
                                " does not match network kind " + to_string(kind_of(net)));
  switch (cfg.kind) {
    case ManifoldKind::Taylor: return taylor_forward(std::get<TaylorNet>(net), y, cfg.order_n);
    case ManifoldKind::Inn: return inn_forward(std::get<InnNet>(net), y);
    case ManifoldKind::Cdc: return std::get<CdcNet>(net).forward(y);
    case ManifoldKind::Reverse: return reverse_filter(std::get<ReverseNet>(net), y, cfg.iterations_k);
  }
  throw std::invalid_argument("unknown manifold kind");
}

const char* to_string(ManifoldKind k) {
  switch (k) {
    case ManifoldKind::Taylor: return "taylor";
    case ManifoldKind::Inn: return "inn";
    case ManifoldKind::Cdc: return "cdc";
    case ManifoldKind::Reverse: return "reverse";
  }
  return "?";
}

ManifoldKind parse_manifold_kind(const std::string& s) {
  if (s == "taylor") return ManifoldKind::Taylor;
  if (s == "inn") return ManifoldKind::Inn;
  if (s == "cdc") return ManifoldKind::Cdc;
  if (s == "reverse") return ManifoldKind::Reverse;
  throw std::invalid_argument("unknown manifold kind '" + s + "' (expected taylor, inn, cdc or reverse)");
}

}  // namespace rwprior
