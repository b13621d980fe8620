#pragma once

#include <vector>

#include "hargan/models/config.hpp"
#include "hargan/models/model.hpp"
#include "hargan/nn/attention.hpp"

namespace hargan::models {

// Shared trunk: 1x1 projection to the model dimension, positional encoding,
// then the encoder stack. Maps [B, C, L] to [B, L, d].
class EncoderTrunk {
 public:
  EncoderTrunk() = default;
  EncoderTrunk(nn::ParameterSet& params, std::size_t in_channels, std::size_t length, std::size_t dim,
               std::size_t heads, std::size_t layers, std::size_t ff_dim, Rng& rng);
  Tensor forward(const Tensor& x) const;

 private:
  nn::Conv1d projection_;
  Tensor position_;  // [L, d], constant
  std::vector<nn::EncoderLayer> encoders_;
};

/// noise -> dense C*L seed -> trunk -> dropout -> 1x1 convolution head to C
/// channels.
class TganGenerator : public Generator {
 public:
  TganGenerator(const TganConfig& config, Rng& rng);

  Architecture architecture() const override { return Architecture::TganGenerator; }
  nlohmann::json config() const override { return config_; }
  const data::DatasetProfile& profile() const override { return config_.profile; }
  std::size_t noise_length() const override { return config_.noise_len; }
  Tensor forward(const Tensor& z, const nn::ForwardContext& ctx = {}) const override;

 private:
  TganConfig config_;
  nn::Linear seed_;
  EncoderTrunk trunk_;
  nn::Conv1d head_;
};

/// x -> trunk -> mean over positions -> dropout -> 1x1 convolution head.
class TganDiscriminator : public Discriminator {
 public:
  TganDiscriminator(const TganConfig& config, Rng& rng);

  Architecture architecture() const override { return Architecture::TganDiscriminator; }
  nlohmann::json config() const override { return config_; }
  const data::DatasetProfile& profile() const override { return config_.profile; }
  Tensor forward(const Tensor& x, const nn::ForwardContext& ctx = {}) const override;

 private:
  TganConfig config_;
  EncoderTrunk trunk_;
  nn::Conv1d head_;
};

}  // namespace hargan::models
