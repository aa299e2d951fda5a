#include "mtad/model/ensemble.hpp"

#include <string>

#include "mtad/error.hpp"
#include "mtad/numeric/rng.hpp"

namespace mtad::model {

std::string EnsembleModel::member_prefix(Symbol label) {
  return "member." + std::string(symbol_name(label));
}

EnsembleModel::EnsembleModel(ModelConfig config, const std::vector<Symbol>& labels, std::uint64_t seed)
    : config_(std::move(config)) {
  SeededRng root(seed);
  for (auto label : labels) {
    if (!is_maneuver(label)) throw ConfigError("ensemble members must be maneuver labels");
    if (find(label)) throw ConfigError("duplicate ensemble label " + std::string(symbol_name(label)));
    auto stream = root.fork(index(label));
    members_.push_back({label, BaselineAutoencoder(config_, stream.next_u64(), member_prefix(label) + ".ae")});
  }
}

EnsembleModel::Member* EnsembleModel::find(Symbol label) {
  for (auto& m : members_) {
    if (m.label == label) return &m;
  }
  return nullptr;
}

std::vector<double> EnsembleModel::member_losses(const Array& window) const {
  std::vector<double> out;
  out.reserve(members_.size());
  for (const auto& m : members_) out.push_back(m.model.loss(window));
  return out;
}

EnsembleModel::Result EnsembleModel::ensemble_loss(const Array& window) const {
  if (members_.empty()) throw Error("ensemble has no members");
  Result best{0.0, members_.front().label};
  bool first = true;
  for (const auto& m : members_) {
    const double l = m.model.loss(window);
    if (first || l < best.loss) best = {l, m.label};
    first = false;
  }
  return best;
}

}  // namespace mtad::model
