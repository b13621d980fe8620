#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "hargan/data/windows.hpp"

namespace hargan::data {

// Class 0 (activity 0) is a sine wave, class 1 (activity 1) a square wave
// of the same period; each channel has its own amplitude and phase, each
// subject a small gain, and Gaussian noise is added per sample.
struct ToyCorpusConfig {
  std::size_t subjects = 3;
  std::size_t channels = 6;
  std::size_t period = 25;
  std::size_t segment_length = 200;   // samples per activity bout
  std::size_t segments_per_class = 2;  // bouts per class per subject
  double noise = 0.1;
  std::uint64_t seed = 7;
};

std::vector<RecordStream> make_toy_streams(const ToyCorpusConfig& config);

}  // namespace hargan::data
