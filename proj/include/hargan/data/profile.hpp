#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace hargan::data {

/// Window geometry and label space of one dataset. Class index i of a
/// classifier corresponds to activity_ids[i].
struct DatasetProfile {
  std::string name;
  std::size_t channels = 0;
  std::size_t length = 0;
  double sample_rate = 0.0;
  std::vector<std::string> channel_names;
  std::vector<int> activity_ids;

  std::size_t num_classes() const { return activity_ids.size(); }
  std::optional<std::size_t> class_index(int activity_id) const;
  int activity_of(std::size_t class_index) const;

  // Throws DataError when the invariants (N >= 2, unique channel names
  // matching `channels`, positive sizes) do not hold.
  void validate() const;

  nlohmann::json to_json() const;
  static DatasetProfile from_json(const nlohmann::json& j);

  // Three IMUs (hand, chest, ankle) x acc/gyro/mag x xyz at 100 Hz, windows
  // of 27x100. The activity subset is a run-configuration input.
  static DatasetProfile pamap2(std::vector<int> activity_ids);
  // Chest IMU acc/gyro at 50 Hz, windows of 6x50, eight activities.
  static DatasetProfile rwhar();
  // Two-class synthetic corpus, 6x50.
  static DatasetProfile toy();
};

// Resolves "pamap2", "rwhar" or "toy". PAMAP2 needs the activity list.
DatasetProfile profile_by_name(const std::string& name, const std::vector<int>& activity_ids = {});

}  // namespace hargan::data
