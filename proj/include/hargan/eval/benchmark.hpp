#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"

namespace hargan::eval {

// Runs one full training epoch (train step plus any scheduled gate).
using EpochRunner = std::function<void()>;

struct EpochTiming {
  std::string name;
  std::vector<double> seconds;  // timed epochs only
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
};

struct BenchmarkResult {
  EpochTiming baseline;
  EpochTiming candidate;
  std::size_t warmup = 0;
  std::size_t epochs = 0;
  double speedup = 0.0;  // baseline.mean / candidate.mean

  nlohmann::json to_json() const;
};

inline constexpr std::size_t kDefaultWarmup = 2;
inline constexpr std::size_t kMinTimedEpochs = 3;

// Discards `warmup` epochs, then times `epochs` epochs with a monotonic clock.
EpochTiming time_epochs(const std::string& name, const EpochRunner& run, std::size_t warmup, std::size_t epochs);

/// Times the baseline, then the candidate, sequentially. Throws DataError
/// when epochs < 3.
BenchmarkResult benchmark_epoch_time(const std::string& baseline_name, const EpochRunner& baseline,
                                     const std::string& candidate_name, const EpochRunner& candidate,
                                     std::size_t warmup = kDefaultWarmup, std::size_t epochs = 5);

}  // namespace hargan::eval
