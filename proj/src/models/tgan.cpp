#include "hargan/models/tgan.hpp"

#include "hargan/core/ops.hpp"

namespace hargan::models {

EncoderTrunk::EncoderTrunk(nn::ParameterSet& params, std::size_t in_channels, std::size_t length, std::size_t dim,
                           std::size_t heads, std::size_t layers, std::size_t ff_dim, Rng& rng)
    : projection_(params, "projection", in_channels, dim, 1, 0, rng), position_(nn::positional_encoding(length, dim)) {
  for (std::size_t i = 0; i < layers; ++i) {
    encoders_.emplace_back(params, "encoder" + std::to_string(i), dim, heads, ff_dim, rng);
  }
}

Tensor EncoderTrunk::forward(const Tensor& x) const {
  Tensor h = permute(projection_.forward(x), {0, 2, 1}) + position_;
  for (const auto& enc : encoders_) h = enc.forward(h);
  return h;
}

TganGenerator::TganGenerator(const TganConfig& config, Rng& rng) : config_(config) {
  config_.validate();
  const auto& p = config_.profile;
  seed_ = nn::Linear(params_, "seed", config_.noise_len, p.channels * p.length, rng);
  trunk_ = EncoderTrunk(params_, p.channels, p.length, config_.model_dim, config_.gen_heads, config_.gen_layers,
                        config_.ff_dim, rng);
  head_ = nn::Conv1d(params_, "head", config_.model_dim, p.channels, 1, 0, rng);
}

Tensor TganGenerator::forward(const Tensor& z, const nn::ForwardContext& ctx) const {
  bool unbatched = false;
  const Tensor zb = detail::as_batch(z, {config_.noise_len}, "tgan generator noise", unbatched);
  const std::size_t B = zb.size(0), C = config_.profile.channels, L = config_.profile.length;
  Tensor h = trunk_.forward(reshape(seed_.forward(zb), {B, C, L}));
  h = head_.forward(nn::dropout(permute(h, {0, 2, 1}), config_.dropout, ctx));
  return unbatched ? reshape(h, {C, L}) : h;
}

TganDiscriminator::TganDiscriminator(const TganConfig& config, Rng& rng) : config_(config) {
  config_.validate();
  const auto& p = config_.profile;
  trunk_ = EncoderTrunk(params_, p.channels, p.length, config_.model_dim, config_.disc_heads, config_.disc_layers,
                        config_.ff_dim, rng);
  head_ = nn::Conv1d(params_, "head", config_.model_dim, 1, 1, 0, rng);
}

Tensor TganDiscriminator::forward(const Tensor& x, const nn::ForwardContext& ctx) const {
  bool unbatched = false;
  const auto& p = config_.profile;
  const Tensor xb = detail::as_batch(x, {p.channels, p.length}, "tgan discriminator input", unbatched);
  const std::size_t B = xb.size(0);
  Tensor pooled = nn::dropout(mean(trunk_.forward(xb), 1), config_.dropout, ctx);
  Tensor logit = reshape(head_.forward(reshape(pooled, {B, config_.model_dim, 1})), {B});
  return unbatched ? reshape(logit, {}) : logit;
}

}  // namespace hargan::models
