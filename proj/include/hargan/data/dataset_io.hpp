#pragma once

#include <filesystem>
#include <optional>

#include "hargan/data/windows.hpp"

namespace hargan::data {

inline constexpr int kManifestVersion = 1;

/// On-disk layout: `manifest.json` plus one or more `windows_<k>.bin` shards
/// of little-endian float64 values, C*L per window, in manifest order. A new
/// shard starts whenever the subject changes. Every file is written through
/// a temporary and renamed into place.
std::filesystem::path save_windowed(const WindowedDataset& ds, const std::filesystem::path& directory,
                                    const std::optional<NormStats>& stats = std::nullopt);

struct LoadedDataset {
  WindowedDataset dataset;
  std::optional<NormStats> stats;
};

// Accepts the directory or the manifest path itself.
LoadedDataset load_windowed(const std::filesystem::path& path);

}  // namespace hargan::data
