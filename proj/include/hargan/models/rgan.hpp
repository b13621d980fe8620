#pragma once

#include <vector>

#include "hargan/models/config.hpp"
#include "hargan/models/model.hpp"
#include "hargan/nn/lstm.hpp"

namespace hargan::models {

/// noise -> dense C*L seed -> expanding convolutions (tanh) -> stacked LSTM
/// over the L positions -> contracting convolutions back to C channels, the
/// last one linear.
class RganGenerator : public Generator {
 public:
  RganGenerator(const RganConfig& config, Rng& rng);

  Architecture architecture() const override { return Architecture::RganGenerator; }
  nlohmann::json config() const override { return config_; }
  const data::DatasetProfile& profile() const override { return config_.profile; }
  std::size_t noise_length() const override { return config_.noise_len; }
  Tensor forward(const Tensor& z, const nn::ForwardContext& ctx = {}) const override;

 private:
  RganConfig config_;
  nn::Linear seed_;
  std::vector<nn::Conv1d> expand_;
  nn::Lstm lstm_;
  std::vector<nn::Conv1d> contract_;
};

/// x -> expanding convolutions (tanh) -> stacked LSTM -> dropout on the
/// hidden state of every step -> 1x1 convolution head -> per-step logits,
/// averaged over time.
class RganDiscriminator : public Discriminator {
 public:
  RganDiscriminator(const RganConfig& config, Rng& rng);

  Architecture architecture() const override { return Architecture::RganDiscriminator; }
  nlohmann::json config() const override { return config_; }
  const data::DatasetProfile& profile() const override { return config_.profile; }
  Tensor forward(const Tensor& x, const nn::ForwardContext& ctx = {}) const override;

 private:
  RganConfig config_;
  std::vector<nn::Conv1d> expand_;
  nn::Lstm lstm_;
  nn::Conv1d head_;
};

}  // namespace hargan::models
