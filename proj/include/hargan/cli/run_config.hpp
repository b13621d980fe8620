#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hargan/data/profile.hpp"
#include "hargan/models/config.hpp"
#include "hargan/models/factory.hpp"
#include "hargan/train/classifier_trainer.hpp"
#include "hargan/train/gan_trainer.hpp"
#include "json.hpp"

namespace hargan::cli {

inline constexpr int kConfigVersion = 1;

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 2,
  kExitData = 3,
  kExitGateNotReached = 4,
  kExitNumerical = 5,
};

// Malformed or incomplete command line / config file.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A profile given as a preset name ("toy", "rwhar", "pamap2"), a preset
/// object {"preset": name, "activity_ids": [...]}, a full profile object,
/// or a path to a JSON file holding any of those.
data::DatasetProfile resolve_profile(const nlohmann::json& spec, const std::filesystem::path& base_dir = {});
data::DatasetProfile resolve_profile_arg(const std::string& arg);

struct IngestSection {
  std::string format;  // canonical-csv | pamap2 | toy
  std::filesystem::path input;
  std::optional<std::size_t> stride;
};

struct ClassifierSection {
  nlohmann::json model = nlohmann::json::object();  // ClassifierConfig keys without the profile
  train::ClassifierTrainConfig training;
};

struct GanSection {
  models::GanFamily family = models::GanFamily::Tgan;
  nlohmann::json model = nlohmann::json::object();  // RganConfig / TganConfig keys without the profile
  train::GanTrainConfig training;
  std::filesystem::path classifier;  // checkpoint used by the gate
  std::vector<int> classes;          // activity ids; empty means every class
};

/// One run's configuration. Relative paths are resolved against the
/// directory of the config file. Unknown keys are rejected.
struct RunConfig {
  int version = kConfigVersion;
  std::optional<std::uint64_t> seed;
  std::filesystem::path out;
  std::optional<data::DatasetProfile> profile;
  std::filesystem::path manifest;
  std::optional<int> validation_subject;
  IngestSection ingest;
  ClassifierSection classifier;
  GanSection gan;
  nlohmann::json source = nlohmann::json::object();  // as read, after flag overrides

  std::uint64_t require_seed() const;
  const std::filesystem::path& require_out() const;
  const data::DatasetProfile& require_profile() const;

  // Model configuration objects with the profile filled in.
  models::ClassifierConfig classifier_config(const data::DatasetProfile& p) const;
  nlohmann::json gan_model_config(const data::DatasetProfile& p) const;
};

RunConfig parse_run_config(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);

// Snapshot written beside a run's outputs.
nlohmann::json to_json(const RunConfig& c);

}  // namespace hargan::cli
