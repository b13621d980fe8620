#include "hargan/models/config.hpp"

#include "hargan/core/errors.hpp"

namespace hargan::models {

using nlohmann::json;

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw DataError("invalid model configuration: " + what);
}

void check_schedule(const std::vector<std::size_t>& s, std::size_t channels, const char* name) {
  require(!s.empty(), std::string(name) + " is empty");
  require(s.front() == channels, std::string(name) + " must start at the profile's " + std::to_string(channels) +
                                     " channels");
  for (std::size_t v : s) require(v >= 1, std::string(name) + " has a zero entry");
}

data::DatasetProfile profile_of(const json& j) {
  if (j.contains("profile")) return data::DatasetProfile::from_json(j.at("profile"));
  throw DataError("invalid model configuration: missing profile");
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw DataError(std::string("invalid model configuration key '") + key + "': " + e.what());
  }
}

}  // namespace

std::vector<std::size_t> doubling_schedule(std::size_t channels, std::size_t top) {
  std::vector<std::size_t> s{channels};
  while (s.back() * 2 < top) s.push_back(s.back() * 2);
  if (s.back() != top) s.push_back(top);
  return s;
}

RganConfig RganConfig::defaults(const data::DatasetProfile& profile) {
  RganConfig c;
  c.profile = profile;
  c.gen_schedule = doubling_schedule(profile.channels, 4 * profile.channels);
  c.disc_schedule = doubling_schedule(profile.channels, 4 * profile.channels);
  return c;
}

void RganConfig::validate() const {
  profile.validate();
  require(noise_len >= 1, "noise_len must be >= 1");
  check_schedule(gen_schedule, profile.channels, "gen_schedule");
  check_schedule(disc_schedule, profile.channels, "disc_schedule");
  require(gen_hidden >= 1 && disc_hidden >= 1, "hidden sizes must be >= 1");
  require(gen_layers >= 1 && disc_layers >= 1, "lstm layer counts must be >= 1");
  require(kernel_size % 2 == 1, "kernel_size must be odd");
  require(dropout >= 0.0 && dropout < 1.0, "dropout must lie in [0, 1)");
}

TganConfig TganConfig::defaults(const data::DatasetProfile& profile) {
  TganConfig c;
  c.profile = profile;
  return c;
}

void TganConfig::validate() const {
  profile.validate();
  require(noise_len >= 1, "noise_len must be >= 1");
  require(model_dim >= 2, "model_dim must be >= 2");
  require(gen_heads >= 1 && model_dim % gen_heads == 0, "model_dim must be divisible by gen_heads");
  require(disc_heads >= 1 && model_dim % disc_heads == 0, "model_dim must be divisible by disc_heads");
  require(ff_dim >= 1, "ff_dim must be >= 1");
  require(dropout >= 0.0 && dropout < 1.0, "dropout must lie in [0, 1)");
}

ClassifierConfig ClassifierConfig::defaults(ClassifierKind kind, const data::DatasetProfile& profile) {
  ClassifierConfig c;
  c.kind = kind;
  c.profile = profile;
  return c;
}

void ClassifierConfig::validate() const {
  profile.validate();
  require(dropout >= 0.0 && dropout < 1.0, "dropout must lie in [0, 1)");
  if (kind == ClassifierKind::ConvLstm) {
    for (std::size_t v : conv_channels) require(v >= 1, "conv_channels has a zero entry");
    require(kernel_size % 2 == 1, "kernel_size must be odd");
    require(lstm_hidden >= 1 && lstm_layers >= 1, "lstm sizes must be >= 1");
  } else {
    require(model_dim >= 2, "model_dim must be >= 2");
    require(heads >= 1 && model_dim % heads == 0, "model_dim must be divisible by heads");
    require(ff_dim >= 1, "ff_dim must be >= 1");
  }
}

std::string to_string(ClassifierKind kind) { return kind == ClassifierKind::ConvLstm ? "conv_lstm" : "transformer"; }

ClassifierKind classifier_kind_from_string(const std::string& s) {
  if (s == "conv_lstm" || s == "deepconvlstm") return ClassifierKind::ConvLstm;
  if (s == "transformer") return ClassifierKind::Transformer;
  throw DataError("unknown classifier kind '" + s + "'");
}

void to_json(json& j, const RganConfig& c) {
  j = {{"profile", c.profile.to_json()},   {"noise_len", c.noise_len},     {"gen_schedule", c.gen_schedule},
       {"gen_hidden", c.gen_hidden},       {"gen_layers", c.gen_layers},   {"disc_schedule", c.disc_schedule},
       {"disc_hidden", c.disc_hidden},     {"disc_layers", c.disc_layers}, {"kernel_size", c.kernel_size},
       {"dropout", c.dropout}};
}

void from_json(const json& j, RganConfig& c) {
  c = RganConfig::defaults(profile_of(j));
  read(j, "noise_len", c.noise_len);
  read(j, "gen_schedule", c.gen_schedule);
  read(j, "gen_hidden", c.gen_hidden);
  read(j, "gen_layers", c.gen_layers);
  read(j, "disc_schedule", c.disc_schedule);
  read(j, "disc_hidden", c.disc_hidden);
  read(j, "disc_layers", c.disc_layers);
  read(j, "kernel_size", c.kernel_size);
  read(j, "dropout", c.dropout);
  c.validate();
}

void to_json(json& j, const TganConfig& c) {
  j = {{"profile", c.profile.to_json()}, {"noise_len", c.noise_len},     {"model_dim", c.model_dim},
       {"gen_heads", c.gen_heads},       {"gen_layers", c.gen_layers},   {"disc_heads", c.disc_heads},
       {"disc_layers", c.disc_layers},   {"ff_dim", c.ff_dim},           {"dropout", c.dropout}};
}

void from_json(const json& j, TganConfig& c) {
  c = TganConfig::defaults(profile_of(j));
  read(j, "noise_len", c.noise_len);
  read(j, "model_dim", c.model_dim);
  read(j, "gen_heads", c.gen_heads);
  read(j, "gen_layers", c.gen_layers);
  read(j, "disc_heads", c.disc_heads);
  read(j, "disc_layers", c.disc_layers);
  read(j, "ff_dim", c.ff_dim);
  read(j, "dropout", c.dropout);
  c.validate();
}

void to_json(json& j, const ClassifierConfig& c) {
  j = {{"kind", to_string(c.kind)},     {"profile", c.profile.to_json()}, {"conv_channels", c.conv_channels},
       {"kernel_size", c.kernel_size},  {"lstm_hidden", c.lstm_hidden},   {"lstm_layers", c.lstm_layers},
       {"model_dim", c.model_dim},      {"heads", c.heads},               {"layers", c.layers},
       {"ff_dim", c.ff_dim},            {"dropout", c.dropout}};
}

void from_json(const json& j, ClassifierConfig& c) {
  std::string kind = "transformer";
  read(j, "kind", kind);
  c = ClassifierConfig::defaults(classifier_kind_from_string(kind), profile_of(j));
  read(j, "conv_channels", c.conv_channels);
  read(j, "kernel_size", c.kernel_size);
  read(j, "lstm_hidden", c.lstm_hidden);
  read(j, "lstm_layers", c.lstm_layers);
  read(j, "model_dim", c.model_dim);
  read(j, "heads", c.heads);
  read(j, "layers", c.layers);
  read(j, "ff_dim", c.ff_dim);
  read(j, "dropout", c.dropout);
  c.validate();
}

}  // namespace hargan::models
