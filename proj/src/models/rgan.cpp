#include "hargan/models/rgan.hpp"

#include "hargan/core/errors.hpp"
#include "hargan/core/ops.hpp"

namespace hargan::models {

namespace {

std::vector<nn::Conv1d> conv_chain(nn::ParameterSet& params, const std::string& prefix,
                                   const std::vector<std::size_t>& channels, std::size_t k, Rng& rng) {
  std::vector<nn::Conv1d> out;
  for (std::size_t i = 0; i + 1 < channels.size(); ++i) {
    out.emplace_back(params, prefix + std::to_string(i), channels[i], channels[i + 1], k, (k - 1) / 2, rng);
  }
  return out;
}

// [B, C, L] -> LSTM over L -> [B, L, H]
nn::LstmOutput run_lstm(const nn::Lstm& lstm, const Tensor& x) { return lstm.forward(permute(x, {0, 2, 1})); }

}  // namespace

RganGenerator::RganGenerator(const RganConfig& config, Rng& rng) : config_(config) {
  config_.validate();
  const auto& p = config_.profile;
  seed_ = nn::Linear(params_, "seed", config_.noise_len, p.channels * p.length, rng);
  expand_ = conv_chain(params_, "expand", config_.gen_schedule, config_.kernel_size, rng);
  lstm_ = nn::Lstm(params_, "lstm", config_.gen_schedule.back(), config_.gen_hidden, config_.gen_layers, rng);
  std::vector<std::size_t> down{config_.gen_hidden};
  down.insert(down.end(), config_.gen_schedule.rbegin(), config_.gen_schedule.rend());
  contract_ = conv_chain(params_, "contract", down, config_.kernel_size, rng);
}

Tensor RganGenerator::forward(const Tensor& z, const nn::ForwardContext&) const {
  bool unbatched = false;
  const Tensor zb = detail::as_batch(z, {config_.noise_len}, "rgan generator noise", unbatched);
  const std::size_t B = zb.size(0), C = config_.profile.channels, L = config_.profile.length;
  Tensor h = reshape(seed_.forward(zb), {B, C, L});
  for (const auto& conv : expand_) h = tanh(conv.forward(h));
  h = permute(run_lstm(lstm_, h).outputs, {0, 2, 1});
  for (std::size_t i = 0; i < contract_.size(); ++i) {
    h = contract_[i].forward(h);
    if (i + 1 < contract_.size()) h = tanh(h);
  }
  return unbatched ? reshape(h, {C, L}) : h;
}

RganDiscriminator::RganDiscriminator(const RganConfig& config, Rng& rng) : config_(config) {
  config_.validate();
  expand_ = conv_chain(params_, "expand", config_.disc_schedule, config_.kernel_size, rng);
  lstm_ = nn::Lstm(params_, "lstm", config_.disc_schedule.back(), config_.disc_hidden, config_.disc_layers, rng);
  head_ = nn::Conv1d(params_, "head", config_.disc_hidden, 1, 1, 0, rng);
}

Tensor RganDiscriminator::forward(const Tensor& x, const nn::ForwardContext& ctx) const {
  bool unbatched = false;
  const auto& p = config_.profile;
  const Tensor xb = detail::as_batch(x, {p.channels, p.length}, "rgan discriminator input", unbatched);
  const std::size_t B = xb.size(0);
  Tensor h = xb;
  for (const auto& conv : expand_) h = tanh(conv.forward(h));
  // One logit per time step from the LSTM outputs, averaged over time.
  Tensor seq = nn::dropout(permute(run_lstm(lstm_, h).outputs, {0, 2, 1}), config_.dropout, ctx);
  Tensor logit = reshape(mean(head_.forward(seq), 2), {B});
  return unbatched ? reshape(logit, {}) : logit;
}

}  // namespace hargan::models
