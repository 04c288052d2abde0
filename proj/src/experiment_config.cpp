#include "rwprior/experiment_config.hpp"

#include <stdexcept>

namespace rwprior {

void ExperimentConfig::validate() const {
  auto wrap = [](const std::string& prefix, auto&& fn) {
    try {
      fn();
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(prefix + "." + e.what());
    }
  };
  wrap("dataset", [&] { dataset.validate(); });
  wrap("model", [&] { model.validate(); });
  wrap("loss", [&] { loss.validate(); });
  if (!(optimizer.lr >= 0.0)) throw std::invalid_argument("optimizer.lr: must be non-negative");
  if (optimizer.epochs < 1) throw std::invalid_argument("optimizer.epochs: must be at least 1");
  if (optimizer.batch < 1) throw std::invalid_argument("optimizer.batch: must be at least 1");
  if (seeds.empty()) throw std::invalid_argument("seeds: must be non-empty");
  if (dataset.val_count < 1) throw std::invalid_argument("dataset.val_count: must be at least 1");
}

}  // namespace rwprior
