#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "hargan/eval/benchmark.hpp"
#include "hargan/eval/correlation.hpp"
#include "hargan/eval/metrics.hpp"

namespace hargan::eval {

// Flat CSV renderings. `class_names` label rows and columns; indices are
// used when it is empty.
std::string per_class_csv(const EvaluationReport& r, const std::vector<std::string>& class_names = {});
std::string confusion_csv(const EvaluationReport& r, bool percent, const std::vector<std::string>& class_names = {});
std::string correlation_csv(const CorrelationReport& r);

/// Writes <stem>.json, <stem>_per_class.csv, <stem>_confusion.csv and
/// <stem>_confusion_percent.csv under `dir`.
void write_evaluation(const EvaluationReport& r, const std::filesystem::path& dir, const std::string& stem,
                      const std::vector<std::string>& class_names = {});
// <stem>.json and <stem>.csv (one row per class and channel).
void write_correlation(const CorrelationReport& r, const std::filesystem::path& dir, const std::string& stem);
void write_json(const nlohmann::json& j, const std::filesystem::path& path);

}  // namespace hargan::eval
