#include "hargan/models/classifiers.hpp"

#include "hargan/core/ops.hpp"

namespace hargan::models {

ConvLstmClassifier::ConvLstmClassifier(const ClassifierConfig& config, Rng& rng) : config_(config) {
  config_.kind = ClassifierKind::ConvLstm;
  config_.validate();
  const auto& p = config_.profile;
  std::size_t in = p.channels;
  for (std::size_t i = 0; i < config_.conv_channels.size(); ++i) {
    convs_.emplace_back(params_, "conv" + std::to_string(i), in, config_.conv_channels[i], config_.kernel_size,
                        (config_.kernel_size - 1) / 2, rng);
    in = config_.conv_channels[i];
  }
  lstm_ = nn::Lstm(params_, "lstm", in, config_.lstm_hidden, config_.lstm_layers, rng);
  head_ = nn::Linear(params_, "head", config_.lstm_hidden, p.num_classes(), rng);
}

Tensor ConvLstmClassifier::forward(const Tensor& x, const nn::ForwardContext& ctx) const {
  bool unbatched = false;
  const auto& p = config_.profile;
  Tensor h = detail::as_batch(x, {p.channels, p.length}, "classifier input", unbatched);
  for (const auto& conv : convs_) h = relu(conv.forward(h));
  Tensor last = nn::dropout(lstm_.forward(permute(h, {0, 2, 1})).final_hidden, config_.dropout, ctx);
  Tensor logits = head_.forward(last);
  return unbatched ? reshape(logits, {p.num_classes()}) : logits;
}

TransformerClassifier::TransformerClassifier(const ClassifierConfig& config, Rng& rng) : config_(config) {
  config_.kind = ClassifierKind::Transformer;
  config_.validate();
  const auto& p = config_.profile;
  trunk_ = EncoderTrunk(params_, p.channels, p.length, config_.model_dim, config_.heads, config_.layers,
                        config_.ff_dim, rng);
  head_ = nn::Linear(params_, "head", config_.model_dim, p.num_classes(), rng);
}

Tensor TransformerClassifier::forward(const Tensor& x, const nn::ForwardContext& ctx) const {
  bool unbatched = false;
  const auto& p = config_.profile;
  const Tensor xb = detail::as_batch(x, {p.channels, p.length}, "classifier input", unbatched);
  Tensor pooled = nn::dropout(mean(trunk_.forward(xb), 1), config_.dropout, ctx);
  Tensor logits = head_.forward(pooled);
  return unbatched ? reshape(logits, {p.num_classes()}) : logits;
}

}  // namespace hargan::models
