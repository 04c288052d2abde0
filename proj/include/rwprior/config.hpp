#pragma once

#include <stdexcept>
#include <string>

#include "rwprior/experiment_config.hpp"

namespace rwprior {

/// Configuration error; the message starts with the offending JSON path.
class ConfigError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Parses and validates a JSON experiment config. Missing fields take their
/// defaults; unknown keys are rejected.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Full JSON document (every field written out) that parse_config accepts.
std::string serialize_config(const ExperimentConfig& cfg);

std::string serialize_net(const RandomNetConfig& net);

}  // namespace rwprior
