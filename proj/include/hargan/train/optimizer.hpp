#pragma once

#include <cstddef>
#include <vector>

#include "hargan/nn/parameters.hpp"
#include "json.hpp"

namespace hargan::train {

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  static AdamConfig gan_defaults() { return {2e-4, 0.5, 0.999, 1e-8}; }
  static AdamConfig classifier_defaults() { return {1e-3, 0.9, 0.999, 1e-8}; }
  void validate() const;
};

void to_json(nlohmann::json& j, const AdamConfig& c);
// Missing keys keep the values already in `c`.
void update_from_json(const nlohmann::json& j, AdamConfig& c);

/// Adaptive-moment descent with bias correction over one ParameterSet.
/// Parameters without a gradient are treated as having a zero gradient.
class Adam {
 public:
  Adam(nn::ParameterSet& params, AdamConfig config);

  // Updates every parameter in place, then clears all gradients. Throws
  // NumericalError (before touching anything) if a gradient is not finite.
  void step();

  std::size_t steps() const { return steps_; }
  const AdamConfig& config() const { return config_; }
  const std::vector<std::vector<double>>& first_moments() const { return m_; }
  const std::vector<std::vector<double>>& second_moments() const { return v_; }

 private:
  nn::ParameterSet* params_;
  AdamConfig config_;
  std::size_t steps_ = 0;
  std::vector<std::vector<double>> m_;
  std::vector<std::vector<double>> v_;
};

}  // namespace hargan::train
