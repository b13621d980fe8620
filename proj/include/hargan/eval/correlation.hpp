#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "hargan/core/rng.hpp"
#include "hargan/data/windows.hpp"
#include "json.hpp"

namespace hargan::eval {

inline constexpr double kCorrelationThreshold = 0.8;
inline constexpr std::size_t kDefaultCorrelationSamples = 10;

// Produces n windows [n, C, L] in the same space as the real data.
using WindowSampler = std::function<Tensor(std::size_t n, Rng& rng)>;

struct CorrelationRow {
  int class_id = 0;
  std::size_t sample_count = 0;
  std::vector<double> r;       // per channel
  std::vector<bool> pass;      // r >= threshold
  std::vector<bool> undefined; // a mean series was constant; r stored as 0

  std::size_t passed() const;
};

struct CorrelationReport {
  double threshold = kCorrelationThreshold;
  std::vector<std::string> channel_names;
  std::vector<CorrelationRow> rows;

  nlohmann::json to_json() const;
};

/// Compares the element-wise mean of the first X real windows of `class_id`
/// with the mean of X generated windows, channel by channel, using pearson().
/// Throws DataError when fewer than X real windows exist or X is 0.
CorrelationRow channel_correlation_report(const data::WindowedDataset& real, const WindowSampler& generator,
                                          int class_id, std::size_t samples, Rng& rng,
                                          double threshold = kCorrelationThreshold);

// Mean over the leading axis of [n, C, L], as a flat C*L vector.
std::vector<double> mean_window(const Tensor& windows);

}  // namespace hargan::eval
