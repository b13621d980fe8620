#include "hargan/train/optimizer.hpp"

#include <cmath>

#include "hargan/core/errors.hpp"

namespace hargan::train {

void AdamConfig::validate() const {
  if (!(learning_rate > 0.0)) throw DataError("learning rate must be positive");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) throw DataError("betas must lie in [0, 1)");
  if (!(epsilon > 0.0)) throw DataError("epsilon must be positive");
}

void to_json(nlohmann::json& j, const AdamConfig& c) {
  j = {{"learning_rate", c.learning_rate}, {"beta1", c.beta1}, {"beta2", c.beta2}, {"epsilon", c.epsilon}};
}

void update_from_json(const nlohmann::json& j, AdamConfig& c) {
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.beta1 = j.value("beta1", c.beta1);
  c.beta2 = j.value("beta2", c.beta2);
  c.epsilon = j.value("epsilon", c.epsilon);
  c.validate();
}

Adam::Adam(nn::ParameterSet& params, AdamConfig config) : params_(&params), config_(config) {
  config_.validate();
  for (const auto& [name, t] : params.entries()) {
    m_.emplace_back(t.numel(), 0.0);
    v_.emplace_back(t.numel(), 0.0);
  }
}

void Adam::step() {
  const auto& entries = params_->entries();
  if (entries.size() != m_.size()) throw ShapeError("parameter set changed after the optimizer was created");
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const Tensor& t = entries[i].second;
    if (t.numel() != m_[i].size()) throw ShapeError("parameter '" + entries[i].first + "' changed shape");
    if (t.has_grad() && t.grad().size() != t.numel()) {
      throw ShapeError("gradient of '" + entries[i].first + "' does not match its parameter");
    }
    for (double g : t.grad()) {
      if (!std::isfinite(g)) throw NumericalError("non-finite gradient in parameter '" + entries[i].first + "'");
    }
  }

  ++steps_;
  const double b1 = config_.beta1, b2 = config_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(steps_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(steps_));
  for (std::size_t i = 0; i < entries.size(); ++i) {
    Tensor t = entries[i].second;
    const auto grad = t.grad();
    auto data = t.mutable_data();
    auto& m = m_[i];
    auto& v = v_[i];
    for (std::size_t k = 0; k < data.size(); ++k) {
      const double g = grad.empty() ? 0.0 : grad[k];
      m[k] = b1 * m[k] + (1.0 - b1) * g;
      v[k] = b2 * v[k] + (1.0 - b2) * g * g;
      const double m_hat = m[k] / c1, v_hat = v[k] / c2;
      data[k] -= config_.learning_rate * m_hat / (std::sqrt(v_hat) + config_.epsilon);
    }
  }
  params_->clear_grads();
}

}  // namespace hargan::train
