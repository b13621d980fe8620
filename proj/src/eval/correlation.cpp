#include "hargan/eval/correlation.hpp"

#include "hargan/core/errors.hpp"
#include "hargan/eval/metrics.hpp"

namespace hargan::eval {

std::size_t CorrelationRow::passed() const {
  std::size_t n = 0;
  for (bool p : pass) n += p;
  return n;
}

nlohmann::json CorrelationReport::to_json() const {
  nlohmann::json rows_json = nlohmann::json::array();
  for (const auto& row : rows) {
    rows_json.push_back({{"class_id", row.class_id},
                         {"sample_count", row.sample_count},
                         {"r", row.r},
                         {"pass", row.pass},
                         {"undefined", row.undefined},
                         {"channels_passed", row.passed()}});
  }
  return {{"threshold", threshold}, {"channels", channel_names}, {"classes", rows_json}};
}

std::vector<double> mean_window(const Tensor& windows) {
  if (windows.dim() != 3 || windows.size(0) == 0) {
    throw ShapeError("mean_window expects a non-empty [n x C x L] batch, got " + shape_to_string(windows.shape()));
  }
  const std::size_t n = windows.size(0), m = windows.size(1) * windows.size(2);
  std::vector<double> out(m, 0.0);
  const auto v = windows.data();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < m; ++k) out[k] += v[i * m + k];
  }
  for (double& x : out) x /= static_cast<double>(n);
  return out;
}

CorrelationRow channel_correlation_report(const data::WindowedDataset& real, const WindowSampler& generator,
                                          int class_id, std::size_t samples, Rng& rng, double threshold) {
  if (samples == 0) throw DataError("correlation report needs at least one sample");
  std::vector<std::size_t> picked;
  for (std::size_t i = 0; i < real.size() && picked.size() < samples; ++i) {
    if (real.windows[i].label == class_id) picked.push_back(i);
  }
  if (picked.size() < samples) {
    throw DataError("class " + std::to_string(class_id) + " has " + std::to_string(picked.size()) +
                    " real windows, correlation report needs " + std::to_string(samples));
  }
  const std::size_t C = real.profile.channels, L = real.profile.length;
  const std::vector<double> real_mean = mean_window(real.batch(picked));
  const Tensor fake = generator(samples, rng);
  if (fake.shape() != Shape{samples, C, L}) {
    throw ShapeError("generator produced " + shape_to_string(fake.shape()) + ", expected " +
                     shape_to_string({samples, C, L}));
  }
  const std::vector<double> fake_mean = mean_window(fake);

  CorrelationRow row;
  row.class_id = class_id;
  row.sample_count = samples;
  for (std::size_t c = 0; c < C; ++c) {
    const std::span<const double> a(real_mean.data() + c * L, L), b(fake_mean.data() + c * L, L);
    double r = 0.0;
    bool undefined = false;
    try {
      r = pearson(a, b);
    } catch (const NumericalError&) {
      undefined = true;
    }
    row.r.push_back(r);
    row.undefined.push_back(undefined);
    row.pass.push_back(!undefined && r >= threshold);
  }
  return row;
}

}  // namespace hargan::eval
