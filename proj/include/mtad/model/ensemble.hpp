#pragma once

#include <cstdint>
#include <vector>

#include "mtad/model/autoencoder.hpp"
#include "mtad/vocab.hpp"

namespace mtad::model {

/// One baseline autoencoder per maneuver label; a window is scored by the
/// member that reconstructs it best.
class EnsembleModel {
 public:
  struct Member {
    Symbol label;
    BaselineAutoencoder model;
  };

  struct Result {
    double loss = 0.0;
    Symbol label = Symbol::Background;
  };

  /// Member i is seeded with a stream forked from `seed`.
  EnsembleModel(ModelConfig config, const std::vector<Symbol>& labels, std::uint64_t seed);

  const ModelConfig& config() const { return config_; }
  std::vector<Member>& members() { return members_; }
  const std::vector<Member>& members() const { return members_; }
  Member* find(Symbol label);

  /// Minimum member MSE and the label of that member; the first member wins ties.
  Result ensemble_loss(const Array& window) const;
  std::vector<double> member_losses(const Array& window) const;

  static std::string member_prefix(Symbol label);

 private:
  ModelConfig config_;
  std::vector<Member> members_;
};

}  // namespace mtad::model
