#include "hargan/eval/benchmark.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>

#include "hargan/core/errors.hpp"

namespace hargan::eval {

namespace {

nlohmann::json timing_json(const EpochTiming& t) {
  return {{"name", t.name}, {"mean_seconds", t.mean}, {"min_seconds", t.min}, {"max_seconds", t.max},
          {"epoch_seconds", t.seconds}};
}

}  // namespace

nlohmann::json BenchmarkResult::to_json() const {
  return {{"baseline", timing_json(baseline)},
          {"candidate", timing_json(candidate)},
          {"warmup_epochs", warmup},
          {"timed_epochs", epochs},
          {"speedup", speedup}};
}

EpochTiming time_epochs(const std::string& name, const EpochRunner& run, std::size_t warmup, std::size_t epochs) {
  if (epochs < kMinTimedEpochs) {
    throw DataError("benchmark needs at least " + std::to_string(kMinTimedEpochs) + " timed epochs");
  }
  using clock = std::chrono::steady_clock;
  for (std::size_t i = 0; i < warmup; ++i) run();
  EpochTiming t;
  t.name = name;
  for (std::size_t i = 0; i < epochs; ++i) {
    const auto start = clock::now();
    run();
    t.seconds.push_back(std::chrono::duration<double>(clock::now() - start).count());
  }
  t.mean = std::accumulate(t.seconds.begin(), t.seconds.end(), 0.0) / static_cast<double>(epochs);
  t.min = *std::min_element(t.seconds.begin(), t.seconds.end());
  t.max = *std::max_element(t.seconds.begin(), t.seconds.end());
  return t;
}

BenchmarkResult benchmark_epoch_time(const std::string& baseline_name, const EpochRunner& baseline,
                                     const std::string& candidate_name, const EpochRunner& candidate,
                                     std::size_t warmup, std::size_t epochs) {
  BenchmarkResult r;
  r.warmup = warmup;
  r.epochs = epochs;
  r.baseline = time_epochs(baseline_name, baseline, warmup, epochs);
  r.candidate = time_epochs(candidate_name, candidate, warmup, epochs);
  if (!(r.candidate.mean > 0.0)) throw NumericalError("candidate epochs took no measurable time");
  r.speedup = r.baseline.mean / r.candidate.mean;
  return r;
}

}  // namespace hargan::eval
