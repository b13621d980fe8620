#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "hargan/core/errors.hpp"
#include "hargan/data/readers.hpp"

namespace hargan::data {

namespace {

constexpr std::size_t kActivityColumn = 1;
constexpr int kTransientActivity = 0;

// Row layout per IMU block of 17 columns starting at `base`: temperature,
// acc (+-16 g) xyz, acc (+-6 g) xyz, gyro xyz, mag xyz, orientation (4).
void append_imu(std::vector<std::size_t>& cols, std::size_t base) {
  for (std::size_t off : {1u, 2u, 3u}) cols.push_back(base + off);     // acc16
  for (std::size_t off : {7u, 8u, 9u}) cols.push_back(base + off);     // gyro
  for (std::size_t off : {10u, 11u, 12u}) cols.push_back(base + off);  // mag
}

double parse_field(const std::string& tok) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) return std::numeric_limits<double>::quiet_NaN();
  return v;
}

int subject_from_name(const std::string& stem) {
  int id = 0;
  const std::string digits = stem.substr(std::string("subject").size());
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), id);
  if (digits.empty() || ec != std::errc() || ptr != digits.data() + digits.size()) {
    throw DataError("cannot read a subject id from file name '" + stem + "'");
  }
  return id;
}

}  // namespace

const std::vector<std::size_t>& pamap2_channel_columns() {
  static const std::vector<std::size_t> cols = [] {
    std::vector<std::size_t> c;
    append_imu(c, 3);   // hand: columns 4-6, 10-12, 13-15
    append_imu(c, 20);  // chest: 21-23, 27-29, 30-32
    append_imu(c, 37);  // ankle: 38-40, 44-46, 47-49
    return c;
  }();
  return cols;
}

std::vector<RecordStream> load_pamap2(const std::filesystem::path& directory, const std::vector<int>& activity_ids) {
  if (!std::filesystem::is_directory(directory)) throw DataError("PAMAP2 directory not found: " + directory.string());
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(directory)) {
    const auto& p = entry.path();
    if (entry.is_regular_file() && p.extension() == ".dat" && p.stem().string().rfind("subject", 0) == 0) {
      files.push_back(p);
    }
  }
  if (files.empty()) throw DataError("no subject*.dat files in " + directory.string());

  const std::set<int> keep(activity_ids.begin(), activity_ids.end());
  const auto& columns = pamap2_channel_columns();
  const DatasetProfile names = DatasetProfile::pamap2({1, 2, 3, 4, 5, 6, 7});

  std::vector<RecordStream> out;
  for (const auto& file : files) {
    std::ifstream in(file);
    if (!in) throw DataError("cannot open " + file.string());
    RecordStream s;
    s.subject_id = subject_from_name(file.stem().string());
    s.sample_rate = names.sample_rate;
    s.channel_names = names.channel_names;
    s.channels.assign(columns.size(), {});

    std::string line, tok;
    std::size_t line_no = 0;
    std::vector<double> row;
    row.reserve(kPamap2Columns);
    while (std::getline(in, line)) {
      ++line_no;
      std::istringstream ls(line);
      row.clear();
      while (ls >> tok) row.push_back(parse_field(tok));
      if (row.empty()) continue;
      if (row.size() != kPamap2Columns) {
        throw DataError(file.string() + ":" + std::to_string(line_no) + ": expected " +
                        std::to_string(kPamap2Columns) + " columns, found " + std::to_string(row.size()));
      }
      const double a = row[kActivityColumn];
      if (!std::isfinite(a)) throw DataError(file.string() + ":" + std::to_string(line_no) + ": bad activity id");
      const int activity = static_cast<int>(a);
      if (activity == kTransientActivity || !keep.count(activity)) continue;
      s.labels.push_back(activity);
      for (std::size_t c = 0; c < columns.size(); ++c) s.channels[c].push_back(row[columns[c]]);
    }
    for (std::size_t c = 0; c < columns.size(); ++c) {
      if (!interpolate_gaps(s.channels[c])) {
        throw DataError(file.string() + ": channel " + s.channel_names[c] + " has no finite value");
      }
    }
    out.push_back(std::move(s));
  }
  std::sort(out.begin(), out.end(), [](const RecordStream& a, const RecordStream& b) { return a.subject_id < b.subject_id; });
  return out;
}

}  // namespace hargan::data
