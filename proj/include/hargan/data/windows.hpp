#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hargan/core/tensor.hpp"
#include "hargan/data/profile.hpp"

namespace hargan::data {

/// Continuous recording of one subject. channels[c][t] is sample t of
/// channel c; labels[t] is the activity id at t.
struct RecordStream {
  int subject_id = 0;
  double sample_rate = 0.0;
  std::vector<std::string> channel_names;
  std::vector<std::vector<double>> channels;
  std::vector<int> labels;

  std::size_t length() const { return labels.size(); }
  void validate() const;
};

struct SensorWindow {
  Tensor data;  // [C x L]
  int label = 0;  // activity id
  int subject_id = 0;
};

struct WindowedDataset {
  DatasetProfile profile;
  std::vector<SensorWindow> windows;

  std::size_t size() const { return windows.size(); }
  bool empty() const { return windows.empty(); }
  // Stacks the selected windows into [B x C x L].
  Tensor batch(std::span<const std::size_t> indices) const;
  Tensor all() const;
  std::vector<int> subjects() const;  // sorted, unique
};

struct NormStats {
  std::vector<double> mean;
  std::vector<double> stddev;
};

/// Sliding windows of profile.length with the given stride. Windows spanning
/// more than one label, or whose label is outside the profile's activities,
/// are discarded. Throws ShapeError when the channel count does not match.
WindowedDataset make_windows(const RecordStream& stream, const DatasetProfile& profile, std::size_t stride);
WindowedDataset make_windows(const std::vector<RecordStream>& streams, const DatasetProfile& profile,
                             std::size_t stride);
inline std::size_t default_stride(const DatasetProfile& profile) { return std::max<std::size_t>(1, profile.length / 2); }

// Per-channel population mean and standard deviation over every window and
// time step. Throws DataError on an empty set or a constant channel.
NormStats fit_normalize(const WindowedDataset& train);
WindowedDataset apply_normalize(const WindowedDataset& ds, const NormStats& stats);
WindowedDataset denormalize(const WindowedDataset& ds, const NormStats& stats);
Tensor denormalize(const Tensor& windows, const NormStats& stats);

// (train, validation); validation holds exactly the held-out subject.
std::pair<WindowedDataset, WindowedDataset> loso_split(const WindowedDataset& ds, int held_out_subject);

// Keyed by activity id; order inside each bucket follows the input.
std::map<int, WindowedDataset> partition_by_class(const WindowedDataset& ds);

// Class indices (per the profile) for every window, in order.
std::vector<std::size_t> class_indices(const WindowedDataset& ds);

}  // namespace hargan::data
