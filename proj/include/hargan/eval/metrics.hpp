#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "json.hpp"

namespace hargan::eval {

struct EvaluationReport {
  std::vector<std::vector<std::size_t>> confusion;  // [true][predicted]
  std::vector<double> per_class_f1;
  double macro_f1 = 0.0;

  std::size_t num_classes() const { return confusion.size(); }
  std::size_t total() const;
  // Row-normalised percentages; rows without samples stay at zero.
  std::vector<std::vector<double>> confusion_percent() const;
  nlohmann::json to_json() const;
};

struct F1Options {
  // Score of a class that appears in neither sequence (TP = FP = FN = 0).
  double absent_class_f1 = 1.0;
};

/// Per-class F1 = 2TP / (2TP + FP + FN); macro F1 is the unweighted mean.
/// Throws DataError on unequal lengths or labels outside [0, N).
EvaluationReport f1_and_confusion(std::span<const std::size_t> predictions, std::span<const std::size_t> truths,
                                  std::size_t num_classes, const F1Options& options = {});

// F1 of `positive` against all other labels. Zero when there is no
// true positive, including the degenerate all-negative case.
double binary_f1(std::span<const std::size_t> predictions, std::span<const std::size_t> truths, std::size_t positive);

/// r = (N Σxy − Σx Σy) / sqrt((N Σx² − (Σx)²)(N Σy² − (Σy)²)).
/// Throws DataError for unequal lengths or N < 2, NumericalError when a
/// series is constant (zero denominator).
double pearson(std::span<const double> x, std::span<const double> y);

}  // namespace hargan::eval
