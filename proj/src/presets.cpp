#include "rwprior/presets.hpp"

#include <sstream>

namespace rwprior {

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"original", "taylor",  "cdc",       "inn",       "reverse",
                                              "epochR",   "iterR",   "once",      "xavier",    "kaiming",
                                              "depth3",   "depth7",  "number357", "number555"};
  return names;
}

RandomNetConfig default_net(ManifoldKind kind) {
  RandomNetConfig n;
  n.kind = kind;
  return n;
}

namespace {

void require_nets(const ExperimentConfig& cfg, const std::string& name) {
  if (cfg.loss.nets.empty())
    throw PresetError("preset '" + name + "' needs a loss network; put a manifold preset (taylor, cdc, inn, reverse) "
                      "before it in the cell label");
}

void replicate(ExperimentConfig& cfg, const std::string& name, std::initializer_list<std::size_t> kernels) {
  require_nets(cfg, name);
  const RandomNetConfig tmpl = cfg.loss.nets.front();
  cfg.loss.nets.clear();
  for (std::size_t k : kernels) {
    RandomNetConfig n = tmpl;
    n.kernel = k;
    cfg.loss.nets.push_back(n);
  }
}

}  // namespace

void apply_preset(ExperimentConfig& cfg, const std::string& name) {
  auto& nets = cfg.loss.nets;
  if (name == "original") {
    nets.clear();
  } else if (name == "taylor" || name == "cdc" || name == "inn" || name == "reverse") {
    nets = {default_net(parse_manifold_kind(name))};
  } else if (name == "epochR" || name == "iterR" || name == "once") {
    const ReinitPolicy p =
        name == "epochR" ? ReinitPolicy::EachEpoch : (name == "iterR" ? ReinitPolicy::EachStep : ReinitPolicy::Once);
    for (auto& n : nets) n.reinit = p;
  } else if (name == "xavier" || name == "kaiming") {
    for (auto& n : nets) n.init = name == "xavier" ? InitScheme::Xavier : InitScheme::Kaiming;
  } else if (name == "depth3" || name == "depth7") {
    for (auto& n : nets) n.depth = name == "depth3" ? 3 : 7;
  } else if (name == "number357") {
    replicate(cfg, name, {3, 5, 7});
  } else if (name == "number555") {
    replicate(cfg, name, {5, 5, 5});
  } else {
    std::ostringstream msg;
    msg << "unknown preset '" << name << "'; available:";
    for (const auto& n : preset_names()) msg << ' ' << n;
    throw PresetError(msg.str());
  }
}

ExperimentConfig apply_cell(const ExperimentConfig& base, const std::string& label) {
  if (label.empty()) throw PresetError("empty cell label");
  ExperimentConfig cfg = base;
  if (label == "custom") return cfg;
  std::size_t start = 0;
  while (start <= label.size()) {
    const std::size_t end = std::min(label.find('+', start), label.size());
    apply_preset(cfg, label.substr(start, end - start));
    start = end + 1;
  }
  return cfg;
}

std::vector<std::string> ablation_grid_labels() {
  std::vector<std::string> labels{"original"};
  for (const char* kind : {"taylor", "cdc", "inn", "reverse"}) {
    labels.push_back(kind);
    labels.push_back(std::string(kind) + "+epochR");
  }
  for (const char* kind : {"taylor", "inn"}) labels.push_back(std::string(kind) + "+epochR+xavier");
  for (const char* kind : {"cdc", "inn"}) {
    labels.push_back(std::string(kind) + "+epochR+depth3");
    labels.push_back(std::string(kind) + "+epochR+depth7");
    labels.push_back(std::string(kind) + "+epochR+number357");
    labels.push_back(std::string(kind) + "+epochR+number555");
  }
  return labels;
}

}  // namespace rwprior
