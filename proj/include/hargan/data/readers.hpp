#pragma once

#include <filesystem>
#include <vector>

#include "hargan/data/windows.hpp"

namespace hargan::data {

/// Reads `subject,activity,t,<channel>...` rows. Returns one stream per
/// subject, ordered by subject id. Non-finite or empty cells are linearly
/// interpolated; leading and trailing gaps take the nearest valid value.
/// The sample rate is estimated from the time column (1 Hz if a subject has
/// a single row).
std::vector<RecordStream> load_canonical_csv(const std::filesystem::path& path);
void write_canonical_csv(const std::vector<RecordStream>& streams, const std::filesystem::path& path);

/// Reads every `subject<id>.dat` file of the public PAMAP2 Protocol layout
/// (54 space-separated columns). Keeps the 27 IMU channels listed by
/// pamap2_channel_columns(), drops activity 0 and any activity not in
/// `activity_ids`. One stream per file, ordered by subject id.
std::vector<RecordStream> load_pamap2(const std::filesystem::path& directory, const std::vector<int>& activity_ids);

// Zero-based column indices into a PAMAP2 row, in output channel order:
// hand, chest, ankle; each acc16 xyz, gyro xyz, mag xyz.
const std::vector<std::size_t>& pamap2_channel_columns();
inline constexpr std::size_t kPamap2Columns = 54;

// Fills non-finite entries in place. Returns false if none is finite.
bool interpolate_gaps(std::vector<double>& series);

}  // namespace hargan::data
