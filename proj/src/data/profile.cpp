#include "hargan/data/profile.hpp"

#include <algorithm>
#include <set>

#include "hargan/core/errors.hpp"

namespace hargan::data {

std::optional<std::size_t> DatasetProfile::class_index(int activity_id) const {
  auto it = std::find(activity_ids.begin(), activity_ids.end(), activity_id);
  if (it == activity_ids.end()) return std::nullopt;
  return static_cast<std::size_t>(it - activity_ids.begin());
}

int DatasetProfile::activity_of(std::size_t index) const {
  if (index >= activity_ids.size()) {
    throw DataError("class index " + std::to_string(index) + " outside profile '" + name + "'");
  }
  return activity_ids[index];
}

void DatasetProfile::validate() const {
  if (channels == 0 || length == 0) throw DataError("profile '" + name + "' has an empty window shape");
  if (!(sample_rate > 0.0)) throw DataError("profile '" + name + "' needs a positive sample rate");
  if (activity_ids.size() < 2) throw DataError("profile '" + name + "' needs at least 2 activities");
  if (std::set<int>(activity_ids.begin(), activity_ids.end()).size() != activity_ids.size()) {
    throw DataError("profile '" + name + "' lists an activity twice");
  }
  if (channel_names.size() != channels) {
    throw DataError("profile '" + name + "' names " + std::to_string(channel_names.size()) + " channels, expected " +
                    std::to_string(channels));
  }
  if (std::set<std::string>(channel_names.begin(), channel_names.end()).size() != channel_names.size()) {
    throw DataError("profile '" + name + "' has duplicate channel names");
  }
}

nlohmann::json DatasetProfile::to_json() const {
  return {{"name", name},
          {"channels", channels},
          {"length", length},
          {"sample_rate", sample_rate},
          {"channel_names", channel_names},
          {"activity_ids", activity_ids}};
}

DatasetProfile DatasetProfile::from_json(const nlohmann::json& j) {
  DatasetProfile p;
  try {
    p.name = j.at("name").get<std::string>();
    p.channels = j.at("channels").get<std::size_t>();
    p.length = j.at("length").get<std::size_t>();
    p.sample_rate = j.at("sample_rate").get<double>();
    p.channel_names = j.at("channel_names").get<std::vector<std::string>>();
    p.activity_ids = j.at("activity_ids").get<std::vector<int>>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("invalid profile: ") + e.what());
  }
  p.validate();
  return p;
}

DatasetProfile DatasetProfile::pamap2(std::vector<int> activity_ids) {
  DatasetProfile p;
  p.name = "pamap2";
  p.channels = 27;
  p.length = 100;
  p.sample_rate = 100.0;
  for (const char* imu : {"hand", "chest", "ankle"}) {
    for (const char* sensor : {"acc", "gyro", "mag"}) {
      for (const char* axis : {"x", "y", "z"}) {
        p.channel_names.push_back(std::string(imu) + "_" + sensor + "_" + axis);
      }
    }
  }
  p.activity_ids = std::move(activity_ids);
  if (p.activity_ids.size() != 7) throw DataError("the pamap2 profile expects 7 activities");
  p.validate();
  return p;
}

DatasetProfile DatasetProfile::rwhar() {
  DatasetProfile p;
  p.name = "rwhar";
  p.channels = 6;
  p.length = 50;
  p.sample_rate = 50.0;
  p.channel_names = {"acc_x", "acc_y", "acc_z", "gyro_x", "gyro_y", "gyro_z"};
  // climbing up, climbing down, jumping, lying, running, sitting, standing, walking
  p.activity_ids = {1, 2, 3, 4, 5, 6, 7, 8};
  p.validate();
  return p;
}

DatasetProfile DatasetProfile::toy() {
  DatasetProfile p;
  p.name = "toy";
  p.channels = 6;
  p.length = 50;
  p.sample_rate = 50.0;
  for (int c = 0; c < 6; ++c) p.channel_names.push_back("ch_" + std::to_string(c));
  p.activity_ids = {0, 1};
  p.validate();
  return p;
}

DatasetProfile profile_by_name(const std::string& name, const std::vector<int>& activity_ids) {
  if (name == "pamap2") {
    if (activity_ids.empty()) throw DataError("the pamap2 profile needs an activity list in the run configuration");
    return DatasetProfile::pamap2(activity_ids);
  }
  DatasetProfile p;
  if (name == "rwhar") {
    p = DatasetProfile::rwhar();
  } else if (name == "toy") {
    p = DatasetProfile::toy();
  } else {
    throw DataError("unknown dataset profile '" + name + "'");
  }
  if (!activity_ids.empty()) {
    p.activity_ids = activity_ids;
    p.validate();
  }
  return p;
}

}  // namespace hargan::data
