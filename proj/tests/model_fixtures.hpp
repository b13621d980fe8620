#pragma once

// Tiny model configurations and hand-derived parameter counts shared by the
// unit and acceptance tests.

#include <cstddef>
#include <vector>

#include "hargan/data/profile.hpp"
#include "hargan/models/config.hpp"

namespace hargan::fixtures {

inline data::DatasetProfile tiny_profile() {
  data::DatasetProfile p;
  p.name = "tiny";
  p.channels = 2;
  p.length = 6;
  p.sample_rate = 10.0;
  p.channel_names = {"a", "b"};
  p.activity_ids = {1, 2, 3};
  return p;
}

inline models::RganConfig tiny_rgan() {
  auto c = models::RganConfig::defaults(tiny_profile());
  c.noise_len = 3;
  c.gen_schedule = {2, 3};
  c.gen_hidden = 3;
  c.gen_layers = 2;
  c.disc_schedule = {2, 4};
  c.disc_hidden = 3;
  c.disc_layers = 2;
  c.dropout = 0.25;
  return c;
}

inline models::TganConfig tiny_tgan() {
  auto c = models::TganConfig::defaults(tiny_profile());
  c.noise_len = 3;
  c.model_dim = 8;
  c.gen_heads = 2;
  c.gen_layers = 1;
  c.disc_heads = 2;
  c.disc_layers = 1;
  c.ff_dim = 6;
  c.dropout = 0.25;
  return c;
}

inline models::ClassifierConfig tiny_classifier(models::ClassifierKind kind) {
  auto c = models::ClassifierConfig::defaults(kind, tiny_profile());
  c.conv_channels = {3, 4};
  c.kernel_size = 3;
  c.lstm_hidden = 3;
  c.lstm_layers = 1;
  c.model_dim = 8;
  c.heads = 2;
  c.layers = 1;
  c.ff_dim = 6;
  c.dropout = 0.25;
  return c;
}

namespace count {

inline std::size_t linear(std::size_t in, std::size_t out, bool bias = true) { return in * out + (bias ? out : 0); }
inline std::size_t conv(std::size_t in, std::size_t out, std::size_t k) { return out * in * k + out; }
inline std::size_t lstm(std::size_t in, std::size_t hidden, std::size_t layers) {
  std::size_t n = 0;
  for (std::size_t l = 0; l < layers; ++l) n += (l == 0 ? in : hidden) * 4 * hidden + hidden * 4 * hidden + 4 * hidden;
  return n;
}
inline std::size_t layer_norm(std::size_t d) { return 2 * d; }
inline std::size_t feed_forward(std::size_t d, std::size_t f) { return linear(d, f) + linear(f, d); }
// Query, value and output projections with bias; key without.
inline std::size_t attention(std::size_t d) { return 3 * linear(d, d) + linear(d, d, false); }
inline std::size_t encoder(std::size_t d, std::size_t f) {
  return attention(d) + 2 * layer_norm(d) + feed_forward(d, f);
}
inline std::size_t chain(const std::vector<std::size_t>& ch, std::size_t k) {
  std::size_t n = 0;
  for (std::size_t i = 0; i + 1 < ch.size(); ++i) n += conv(ch[i], ch[i + 1], k);
  return n;
}

inline std::size_t rgan_generator(const models::RganConfig& c) {
  const std::size_t C = c.profile.channels, L = c.profile.length;
  std::vector<std::size_t> down{c.gen_hidden};
  down.insert(down.end(), c.gen_schedule.rbegin(), c.gen_schedule.rend());
  return linear(c.noise_len, C * L) + chain(c.gen_schedule, c.kernel_size) +
         lstm(c.gen_schedule.back(), c.gen_hidden, c.gen_layers) + chain(down, c.kernel_size);
}

inline std::size_t rgan_discriminator(const models::RganConfig& c) {
  return chain(c.disc_schedule, c.kernel_size) + lstm(c.disc_schedule.back(), c.disc_hidden, c.disc_layers) +
         conv(c.disc_hidden, 1, 1);
}

inline std::size_t tgan_generator(const models::TganConfig& c) {
  const std::size_t C = c.profile.channels, L = c.profile.length, d = c.model_dim;
  return linear(c.noise_len, C * L) + conv(C, d, 1) + c.gen_layers * encoder(d, c.ff_dim) + conv(d, C, 1);
}

inline std::size_t tgan_discriminator(const models::TganConfig& c) {
  const std::size_t d = c.model_dim;
  return conv(c.profile.channels, d, 1) + c.disc_layers * encoder(d, c.ff_dim) + conv(d, 1, 1);
}

inline std::size_t classifier(const models::ClassifierConfig& c) {
  const std::size_t C = c.profile.channels, N = c.profile.num_classes();
  if (c.kind == models::ClassifierKind::ConvLstm) {
    std::vector<std::size_t> ch{C};
    ch.insert(ch.end(), c.conv_channels.begin(), c.conv_channels.end());
    return chain(ch, c.kernel_size) + lstm(ch.back(), c.lstm_hidden, c.lstm_layers) + linear(c.lstm_hidden, N);
  }
  return conv(C, c.model_dim, 1) + c.layers * encoder(c.model_dim, c.ff_dim) + linear(c.model_dim, N);
}

}  // namespace count

}  // namespace hargan::fixtures
