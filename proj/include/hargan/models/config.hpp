#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "hargan/data/profile.hpp"
#include "json.hpp"

namespace hargan::models {

// Channels C, 2C, 4C, ... below `top`, then `top`.
std::vector<std::size_t> doubling_schedule(std::size_t channels, std::size_t top);

/// Recurrent GAN. Both schedules start at the profile's channel count C and
/// end at the LSTM input size. The generator maps noise to a C x L seed,
/// climbs its schedule, runs the LSTM, then descends the schedule in reverse
/// from the LSTM hidden size back to C.
struct RganConfig {
  data::DatasetProfile profile;
  std::size_t noise_len = 32;
  std::vector<std::size_t> gen_schedule;
  std::size_t gen_hidden = 32;
  std::size_t gen_layers = 1;
  std::vector<std::size_t> disc_schedule;
  std::size_t disc_hidden = 32;
  std::size_t disc_layers = 1;
  std::size_t kernel_size = 3;
  double dropout = 0.2;

  static RganConfig defaults(const data::DatasetProfile& profile);
  void validate() const;
};

/// Transformer GAN; both networks share the model dimension and the
/// feed-forward width.
struct TganConfig {
  data::DatasetProfile profile;
  std::size_t noise_len = 32;
  std::size_t model_dim = 16;
  std::size_t gen_heads = 2;
  std::size_t gen_layers = 1;
  std::size_t disc_heads = 2;
  std::size_t disc_layers = 1;
  std::size_t ff_dim = 32;
  double dropout = 0.1;

  static TganConfig defaults(const data::DatasetProfile& profile);
  void validate() const;
};

enum class ClassifierKind { ConvLstm, Transformer };

struct ClassifierConfig {
  ClassifierKind kind = ClassifierKind::Transformer;
  data::DatasetProfile profile;
  // DeepConvLSTM
  std::vector<std::size_t> conv_channels{16, 16};
  std::size_t kernel_size = 5;
  std::size_t lstm_hidden = 32;
  std::size_t lstm_layers = 1;
  // transformer
  std::size_t model_dim = 16;
  std::size_t heads = 2;
  std::size_t layers = 1;
  std::size_t ff_dim = 32;

  double dropout = 0.1;

  static ClassifierConfig defaults(ClassifierKind kind, const data::DatasetProfile& profile);
  void validate() const;
};

std::string to_string(ClassifierKind kind);
ClassifierKind classifier_kind_from_string(const std::string& s);

// Missing keys keep their defaults (for the profile given in the object);
// present keys are type-checked. Invalid results throw DataError.
void to_json(nlohmann::json& j, const RganConfig& c);
void from_json(const nlohmann::json& j, RganConfig& c);
void to_json(nlohmann::json& j, const TganConfig& c);
void from_json(const nlohmann::json& j, TganConfig& c);
void to_json(nlohmann::json& j, const ClassifierConfig& c);
void from_json(const nlohmann::json& j, ClassifierConfig& c);

}  // namespace hargan::models
