#pragma once

#include <string>
#include <vector>

#include "rwprior/experiment_config.hpp"

namespace rwprior {

/// Thrown for unknown preset names; the message lists the available ones.
class PresetError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Names accepted by apply_preset, in documentation order.
const std::vector<std::string>& preset_names();

/// Default single-net configuration for a manifold kind.
RandomNetConfig default_net(ManifoldKind kind);

/// Applies one preset to cfg.loss:
///   original                     no loss networks
///   taylor | cdc | inn | reverse one default net of that kind (replaces the list)
///   epochR / iterR / once        reinit policy of every net
///   xavier / kaiming             init scheme of every net
///   depth3 / depth7              depth of every net
///   number357                    three copies of the first net with kernels 3, 5, 7
///   number555                    three copies of the first net with kernel 5
void apply_preset(ExperimentConfig& cfg, const std::string& name);

/// Applies the '+'-separated presets of `label` in order over a copy of base.
ExperimentConfig apply_cell(const ExperimentConfig& base, const std::string& label);

/// Labels covering every ablation axis: each manifold with and without
/// epochR, Xavier init, depth 3 / 7 and Number(357) / Number(555) on the CDC
/// and INN nets, plus the original baseline.
std::vector<std::string> ablation_grid_labels();

}  // namespace rwprior
