#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hargan/cli/run_config.hpp"
#include "hargan/eval/benchmark.hpp"

namespace hargan::cli {

// Fixed layout under a run's output root.
inline constexpr const char* kWindowsDir = "windows";
inline constexpr const char* kClassifierDir = "classifier";

// Flags shared by every subcommand; set flags win over config keys.
struct CommonOptions {
  std::optional<std::filesystem::path> config;
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> out;
  std::optional<std::string> profile;
  std::size_t jobs = 1;
};

RunConfig resolve_run_config(const CommonOptions& common);

struct IngestOptions {
  CommonOptions common;
  std::optional<std::string> format;
  std::optional<std::filesystem::path> input;
  std::optional<std::size_t> stride;
};

// Writes <out>/windows; returns the manifest path.
std::filesystem::path cmd_ingest(const IngestOptions& opts, std::ostream& log);

struct TrainClassifierOptions {
  CommonOptions common;
  std::optional<std::filesystem::path> manifest;
  std::optional<int> validation_subject;
};

// Reads <out>/windows unless a manifest is given. Writes classifier.ckpt,
// classifier_log.csv, validation reports and the config snapshot under
// <out>/classifier.
int cmd_train_classifier(const TrainClassifierOptions& opts, std::ostream& log);

struct TrainGanOptions {
  CommonOptions common;
  std::optional<std::filesystem::path> manifest;
  std::optional<std::filesystem::path> classifier;
  std::optional<std::string> family;
  std::optional<std::size_t> max_epochs;
  std::vector<int> classes;
};

/// One GAN per class under <out>/<family>/class_<activity>/, gated by
/// <out>/classifier/classifier.ckpt unless another checkpoint is given. Returns kExitOk when
/// every class reached the gate, kExitGateNotReached otherwise.
int cmd_train_gan(const TrainGanOptions& opts, std::ostream& log);

struct GenerateOptions {
  std::filesystem::path checkpoint;
  std::size_t count = 0;
  std::optional<std::uint64_t> seed;
  std::filesystem::path out;
};

// Writes `count` windows labelled with the checkpoint's class.
std::filesystem::path cmd_generate(const GenerateOptions& opts, std::ostream& log);

struct EvaluateOptions {
  std::filesystem::path classifier;
  std::optional<std::filesystem::path> generator;
  std::optional<std::filesystem::path> windows;
  std::filesystem::path real;
  std::size_t samples = 10;        // X real and X synthetic windows per class
  std::size_t gate_samples = 128;  // windows drawn from a generator
  std::optional<std::uint64_t> seed;
  std::filesystem::path out;
};

/// Classifies the synthetic windows (gate F1 and confusion matrix) and
/// writes the per-channel correlation report against the real windows.
nlohmann::json cmd_evaluate(const EvaluateOptions& opts, std::ostream& log);

struct BenchmarkOptions {
  std::filesystem::path baseline;
  std::filesystem::path candidate;
  std::size_t epochs = 5;
  std::size_t warmup = eval::kDefaultWarmup;
  std::optional<std::uint64_t> seed;
  std::filesystem::path out;
};

eval::BenchmarkResult cmd_benchmark(const BenchmarkOptions& opts, std::ostream& log);

// Parses argv and dispatches; exceptions are mapped onto exit codes and
// reported on `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hargan::cli
