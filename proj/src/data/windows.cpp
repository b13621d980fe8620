#include "hargan/data/windows.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "hargan/core/errors.hpp"

namespace hargan::data {

void RecordStream::validate() const {
  if (!(sample_rate > 0.0)) throw DataError("stream of subject " + std::to_string(subject_id) + " has no sample rate");
  if (channel_names.size() != channels.size()) throw DataError("channel names do not match channel count");
  for (const auto& ch : channels) {
    if (ch.size() != labels.size()) {
      throw DataError("stream of subject " + std::to_string(subject_id) + " has channels of unequal length");
    }
  }
}

Tensor WindowedDataset::batch(std::span<const std::size_t> indices) const {
  const std::size_t C = profile.channels, L = profile.length, n = C * L;
  std::vector<double> out(indices.size() * n);
  for (std::size_t b = 0; b < indices.size(); ++b) {
    const auto src = windows.at(indices[b]).data.data();
    std::copy(src.begin(), src.end(), out.begin() + static_cast<std::ptrdiff_t>(b * n));
  }
  return Tensor({indices.size(), C, L}, std::move(out));
}

Tensor WindowedDataset::all() const {
  std::vector<std::size_t> idx(windows.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  return batch(idx);
}

std::vector<int> WindowedDataset::subjects() const {
  std::set<int> s;
  for (const auto& w : windows) s.insert(w.subject_id);
  return {s.begin(), s.end()};
}

namespace {

void append_windows(WindowedDataset& ds, const RecordStream& stream, std::size_t stride) {
  const DatasetProfile& profile = ds.profile;
  if (stride == 0) throw DataError("window stride must be at least 1");
  stream.validate();
  if (stream.channels.size() != profile.channels) {
    throw ShapeError("stream of subject " + std::to_string(stream.subject_id) + " has " +
                     std::to_string(stream.channels.size()) + " channels but profile '" + profile.name +
                     "' expects " + shape_to_string({profile.channels, profile.length}) + " windows");
  }
  const std::size_t C = profile.channels, L = profile.length, T = stream.length();
  for (std::size_t start = 0; start + L <= T; start += stride) {
    const int label = stream.labels[start];
    bool uniform = true;
    for (std::size_t t = start + 1; t < start + L && uniform; ++t) uniform = stream.labels[t] == label;
    if (!uniform || !profile.class_index(label)) continue;
    std::vector<double> data(C * L);
    for (std::size_t c = 0; c < C; ++c) {
      std::copy_n(stream.channels[c].begin() + static_cast<std::ptrdiff_t>(start), L,
                  data.begin() + static_cast<std::ptrdiff_t>(c * L));
    }
    ds.windows.push_back({Tensor({C, L}, std::move(data)), label, stream.subject_id});
  }
}

WindowedDataset same_profile(const WindowedDataset& ds) {
  WindowedDataset out;
  out.profile = ds.profile;
  return out;
}

void check_stats(const WindowedDataset& ds, const NormStats& stats) {
  if (stats.mean.size() != ds.profile.channels || stats.stddev.size() != ds.profile.channels) {
    throw ShapeError("normalization statistics cover " + std::to_string(stats.mean.size()) + " channels, dataset has " +
                     std::to_string(ds.profile.channels));
  }
}

template <typename F>
WindowedDataset map_channels(const WindowedDataset& ds, const NormStats& stats, F f) {
  check_stats(ds, stats);
  WindowedDataset out = same_profile(ds);
  const std::size_t L = ds.profile.length;
  out.windows.reserve(ds.size());
  for (const auto& w : ds.windows) {
    std::vector<double> v(w.data.data().begin(), w.data.data().end());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(v[i], i / L);
    out.windows.push_back({Tensor(w.data.shape(), std::move(v)), w.label, w.subject_id});
  }
  return out;
}

}  // namespace

WindowedDataset make_windows(const RecordStream& stream, const DatasetProfile& profile, std::size_t stride) {
  WindowedDataset ds;
  ds.profile = profile;
  append_windows(ds, stream, stride);
  return ds;
}

WindowedDataset make_windows(const std::vector<RecordStream>& streams, const DatasetProfile& profile,
                             std::size_t stride) {
  WindowedDataset ds;
  ds.profile = profile;
  for (const auto& s : streams) append_windows(ds, s, stride);
  return ds;
}

NormStats fit_normalize(const WindowedDataset& train) {
  if (train.empty()) throw DataError("cannot fit normalization on an empty split");
  const std::size_t C = train.profile.channels, L = train.profile.length;
  NormStats stats;
  stats.mean.assign(C, 0.0);
  stats.stddev.assign(C, 0.0);
  const double count = static_cast<double>(train.size() * L);
  for (const auto& w : train.windows) {
    const auto d = w.data.data();
    for (std::size_t c = 0; c < C; ++c) {
      for (std::size_t t = 0; t < L; ++t) stats.mean[c] += d[c * L + t];
    }
  }
  for (double& m : stats.mean) m /= count;
  for (const auto& w : train.windows) {
    const auto d = w.data.data();
    for (std::size_t c = 0; c < C; ++c) {
      for (std::size_t t = 0; t < L; ++t) {
        const double e = d[c * L + t] - stats.mean[c];
        stats.stddev[c] += e * e;
      }
    }
  }
  for (std::size_t c = 0; c < C; ++c) {
    stats.stddev[c] = std::sqrt(stats.stddev[c] / count);
    if (!(stats.stddev[c] > 0.0)) {
      const std::string name = c < train.profile.channel_names.size() ? train.profile.channel_names[c] : std::to_string(c);
      throw DataError("channel " + name + " has zero variance in the training split");
    }
  }
  return stats;
}

WindowedDataset apply_normalize(const WindowedDataset& ds, const NormStats& stats) {
  return map_channels(ds, stats, [&](double v, std::size_t c) { return (v - stats.mean[c]) / stats.stddev[c]; });
}

WindowedDataset denormalize(const WindowedDataset& ds, const NormStats& stats) {
  return map_channels(ds, stats, [&](double v, std::size_t c) { return v * stats.stddev[c] + stats.mean[c]; });
}

Tensor denormalize(const Tensor& windows, const NormStats& stats) {
  const std::size_t C = stats.mean.size();
  if (windows.dim() < 2 || windows.size(-2) != C) {
    throw ShapeError("cannot denormalize " + shape_to_string(windows.shape()) + " with " + std::to_string(C) +
                     "-channel statistics");
  }
  const std::size_t L = windows.size(-1);
  std::vector<double> v(windows.data().begin(), windows.data().end());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::size_t c = (i / L) % C;
    v[i] = v[i] * stats.stddev[c] + stats.mean[c];
  }
  return Tensor(windows.shape(), std::move(v));
}

std::pair<WindowedDataset, WindowedDataset> loso_split(const WindowedDataset& ds, int held_out_subject) {
  std::pair<WindowedDataset, WindowedDataset> out{same_profile(ds), same_profile(ds)};
  for (const auto& w : ds.windows) (w.subject_id == held_out_subject ? out.second : out.first).windows.push_back(w);
  if (out.second.empty()) throw DataError("subject " + std::to_string(held_out_subject) + " is not in the dataset");
  return out;
}

std::map<int, WindowedDataset> partition_by_class(const WindowedDataset& ds) {
  std::map<int, WindowedDataset> out;
  for (const auto& w : ds.windows) {
    auto [it, inserted] = out.try_emplace(w.label);
    if (inserted) it->second.profile = ds.profile;
    it->second.windows.push_back(w);
  }
  return out;
}

std::vector<std::size_t> class_indices(const WindowedDataset& ds) {
  std::vector<std::size_t> out;
  out.reserve(ds.size());
  for (const auto& w : ds.windows) {
    auto idx = ds.profile.class_index(w.label);
    if (!idx) throw DataError("activity " + std::to_string(w.label) + " is not part of profile '" + ds.profile.name + "'");
    out.push_back(*idx);
  }
  return out;
}

}  // namespace hargan::data
