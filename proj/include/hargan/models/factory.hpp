#pragma once

#include <memory>
#include <string>

#include "hargan/models/config.hpp"
#include "hargan/models/model.hpp"

namespace hargan::models {

enum class GanFamily { Rgan, Tgan };

std::string to_string(GanFamily family);
GanFamily gan_family_from_string(const std::string& s);

// Builds from an architecture tag and its configuration object; parameters
// are initialised from `rng`.
std::unique_ptr<Model> build_model(Architecture arch, const nlohmann::json& config, Rng& rng);

std::unique_ptr<Generator> build_generator(GanFamily family, const nlohmann::json& config, Rng& rng);
std::unique_ptr<Discriminator> build_discriminator(GanFamily family, const nlohmann::json& config, Rng& rng);
std::unique_ptr<Classifier> build_classifier(const ClassifierConfig& config, Rng& rng);

}  // namespace hargan::models
