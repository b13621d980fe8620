#include "hargan/models/factory.hpp"

#include "hargan/core/errors.hpp"
#include "hargan/models/classifiers.hpp"
#include "hargan/models/rgan.hpp"
#include "hargan/models/tgan.hpp"

namespace hargan::models {

std::string to_string(GanFamily family) { return family == GanFamily::Rgan ? "rgan" : "tgan"; }

GanFamily gan_family_from_string(const std::string& s) {
  if (s == "rgan") return GanFamily::Rgan;
  if (s == "tgan") return GanFamily::Tgan;
  throw DataError("unknown GAN family '" + s + "' (expected rgan or tgan)");
}

std::unique_ptr<Model> build_model(Architecture arch, const nlohmann::json& config, Rng& rng) {
  switch (arch) {
    case Architecture::RganGenerator:
      return std::make_unique<RganGenerator>(config.get<RganConfig>(), rng);
    case Architecture::RganDiscriminator:
      return std::make_unique<RganDiscriminator>(config.get<RganConfig>(), rng);
    case Architecture::TganGenerator:
      return std::make_unique<TganGenerator>(config.get<TganConfig>(), rng);
    case Architecture::TganDiscriminator:
      return std::make_unique<TganDiscriminator>(config.get<TganConfig>(), rng);
    case Architecture::ConvLstmClassifier:
    case Architecture::TransformerClassifier: {
      auto c = config.get<ClassifierConfig>();
      c.kind = arch == Architecture::ConvLstmClassifier ? ClassifierKind::ConvLstm : ClassifierKind::Transformer;
      return build_classifier(c, rng);
    }
  }
  throw DataError("unsupported architecture");
}

std::unique_ptr<Generator> build_generator(GanFamily family, const nlohmann::json& config, Rng& rng) {
  if (family == GanFamily::Rgan) return std::make_unique<RganGenerator>(config.get<RganConfig>(), rng);
  return std::make_unique<TganGenerator>(config.get<TganConfig>(), rng);
}

std::unique_ptr<Discriminator> build_discriminator(GanFamily family, const nlohmann::json& config, Rng& rng) {
  if (family == GanFamily::Rgan) return std::make_unique<RganDiscriminator>(config.get<RganConfig>(), rng);
  return std::make_unique<TganDiscriminator>(config.get<TganConfig>(), rng);
}

std::unique_ptr<Classifier> build_classifier(const ClassifierConfig& config, Rng& rng) {
  if (config.kind == ClassifierKind::ConvLstm) return std::make_unique<ConvLstmClassifier>(config, rng);
  return std::make_unique<TransformerClassifier>(config, rng);
}

}  // namespace hargan::models
