#include "hargan/data/toy_corpus.hpp"

#include <cmath>
#include <numbers>

#include "hargan/core/errors.hpp"
#include "hargan/core/rng.hpp"

namespace hargan::data {

std::vector<RecordStream> make_toy_streams(const ToyCorpusConfig& config) {
  if (config.period == 0 || config.channels == 0) throw DataError("toy corpus needs a period and channels");
  const DatasetProfile profile = DatasetProfile::toy();
  Rng rng(config.seed);
  std::vector<double> amplitude(config.channels), phase(config.channels);
  for (std::size_t c = 0; c < config.channels; ++c) {
    amplitude[c] = 1.0 + 0.25 * static_cast<double>(c);
    phase[c] = 2.0 * std::numbers::pi * static_cast<double>(c) / static_cast<double>(config.channels);
  }

  std::vector<RecordStream> out;
  for (std::size_t s = 0; s < config.subjects; ++s) {
    RecordStream stream;
    stream.subject_id = static_cast<int>(s) + 1;
    stream.sample_rate = profile.sample_rate;
    for (std::size_t c = 0; c < config.channels; ++c) stream.channel_names.push_back("ch_" + std::to_string(c));
    stream.channels.assign(config.channels, {});
    const double gain = rng.uniform(0.9, 1.1);
    std::size_t t = 0;
    for (std::size_t seg = 0; seg < 2 * config.segments_per_class; ++seg) {
      const int activity = static_cast<int>(seg % 2);
      for (std::size_t i = 0; i < config.segment_length; ++i, ++t) {
        stream.labels.push_back(activity);
        const double angle = 2.0 * std::numbers::pi * static_cast<double>(t % config.period) /
                             static_cast<double>(config.period);
        for (std::size_t c = 0; c < config.channels; ++c) {
          const double s_ = std::sin(angle + phase[c]);
          const double wave = activity == 0 ? s_ : (s_ >= 0.0 ? 1.0 : -1.0);
          stream.channels[c].push_back(gain * amplitude[c] * wave + config.noise * rng.normal());
        }
      }
    }
    out.push_back(std::move(stream));
  }
  return out;
}

}  // namespace hargan::data
