#include "hargan/eval/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "hargan/core/errors.hpp"

namespace hargan::eval {

std::size_t EvaluationReport::total() const {
  std::size_t n = 0;
  for (const auto& row : confusion) {
    for (std::size_t v : row) n += v;
  }
  return n;
}

std::vector<std::vector<double>> EvaluationReport::confusion_percent() const {
  std::vector<std::vector<double>> out(confusion.size());
  for (std::size_t i = 0; i < confusion.size(); ++i) {
    std::size_t row_total = 0;
    for (std::size_t v : confusion[i]) row_total += v;
    out[i].assign(confusion[i].size(), 0.0);
    if (row_total == 0) continue;
    for (std::size_t j = 0; j < confusion[i].size(); ++j) {
      out[i][j] = 100.0 * static_cast<double>(confusion[i][j]) / static_cast<double>(row_total);
    }
  }
  return out;
}

nlohmann::json EvaluationReport::to_json() const {
  return {{"confusion_matrix", confusion},
          {"confusion_percent", confusion_percent()},
          {"per_class_f1", per_class_f1},
          {"macro_f1", macro_f1},
          {"samples", total()}};
}

EvaluationReport f1_and_confusion(std::span<const std::size_t> predictions, std::span<const std::size_t> truths,
                                  std::size_t num_classes, const F1Options& options) {
  if (predictions.size() != truths.size()) {
    throw DataError("prediction and truth sequences differ in length (" + std::to_string(predictions.size()) + " vs " +
                    std::to_string(truths.size()) + ")");
  }
  EvaluationReport r;
  r.confusion.assign(num_classes, std::vector<std::size_t>(num_classes, 0));
  for (std::size_t i = 0; i < truths.size(); ++i) {
    if (truths[i] >= num_classes || predictions[i] >= num_classes) {
      throw DataError("label out of range at position " + std::to_string(i));
    }
    ++r.confusion[truths[i]][predictions[i]];
  }
  r.per_class_f1.resize(num_classes);
  double sum = 0.0;
  for (std::size_t k = 0; k < num_classes; ++k) {
    std::size_t fp = 0, fn = 0;
    for (std::size_t j = 0; j < num_classes; ++j) {
      if (j == k) continue;
      fp += r.confusion[j][k];
      fn += r.confusion[k][j];
    }
    const std::size_t tp = r.confusion[k][k];
    const std::size_t denom = 2 * tp + fp + fn;
    r.per_class_f1[k] = denom == 0 ? options.absent_class_f1 : 2.0 * static_cast<double>(tp) / static_cast<double>(denom);
    sum += r.per_class_f1[k];
  }
  r.macro_f1 = num_classes ? sum / static_cast<double>(num_classes) : 0.0;
  return r;
}

double binary_f1(std::span<const std::size_t> predictions, std::span<const std::size_t> truths, std::size_t positive) {
  if (predictions.size() != truths.size()) throw DataError("prediction and truth sequences differ in length");
  std::size_t tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < truths.size(); ++i) {
    const bool p = predictions[i] == positive, t = truths[i] == positive;
    tp += p && t;
    fp += p && !t;
    fn += !p && t;
  }
  if (tp == 0) return 0.0;
  return 2.0 * static_cast<double>(tp) / static_cast<double>(2 * tp + fp + fn);
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DataError("pearson: series differ in length");
  if (x.size() < 2) throw DataError("pearson: need at least 2 points");
  auto constant = [](std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [&](double e) { return e == v.front(); });
  };
  if (constant(x) || constant(y)) throw NumericalError("pearson: correlation undefined for a constant series");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxy += x[i] * y[i];
    sxx += x[i] * x[i];
    syy += y[i] * y[i];
  }
  const double vx = n * sxx - sx * sx;
  const double vy = n * syy - sy * sy;
  if (!(vx > 0.0) || !(vy > 0.0)) throw NumericalError("pearson: correlation undefined for a constant series");
  const double r = (n * sxy - sx * sy) / std::sqrt(vx * vy);
  if (!std::isfinite(r) || std::abs(r) > 1.0 + 1e-12) throw NumericalError("pearson: result outside [-1, 1]");
  return std::clamp(r, -1.0, 1.0);
}

}  // namespace hargan::eval
