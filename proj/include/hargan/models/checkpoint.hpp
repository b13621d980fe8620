#pragma once

#include <filesystem>
#include <memory>

#include "hargan/models/model.hpp"

namespace hargan::models {

inline constexpr int kCheckpointVersion = 1;

/// Layout: one line of compact JSON (format version, architecture tag,
/// config, tensor name/shape table, free-form metadata), a newline, then
/// every tensor's values as little-endian float64 in table order.
void save_checkpoint(const Model& model, const std::filesystem::path& path,
                     const nlohmann::json& metadata = nlohmann::json::object());

struct LoadedCheckpoint {
  std::unique_ptr<Model> model;
  nlohmann::json metadata;
};

// Throws DataError on a version mismatch, a malformed file, or a tensor
// table that disagrees with the architecture.
LoadedCheckpoint load_checkpoint(const std::filesystem::path& path);

// As load_checkpoint, but also checks the model kind.
std::unique_ptr<Generator> load_generator(const std::filesystem::path& path, nlohmann::json* metadata = nullptr);
std::unique_ptr<Classifier> load_classifier(const std::filesystem::path& path, nlohmann::json* metadata = nullptr);

}  // namespace hargan::models
