#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "hargan/core/errors.hpp"
#include "hargan/core/io.hpp"
#include "hargan/data/readers.hpp"

namespace hargan::data {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string where(const std::filesystem::path& path, std::size_t line) {
  return path.string() + ":" + std::to_string(line) + ": ";
}

// Empty cells read as NaN; anything else must parse completely.
bool parse_cell(std::string_view cell, double& out) {
  if (cell.empty()) {
    out = std::numeric_limits<double>::quiet_NaN();
    return true;
  }
  if (cell.front() == '+') cell.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), out);
  return ec == std::errc() && ptr == cell.data() + cell.size();
}

bool parse_int(std::string_view cell, int& out) {
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), out);
  return !cell.empty() && ec == std::errc() && ptr == cell.data() + cell.size();
}

void append_number(std::string& out, double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, ptr);
}

struct PendingStream {
  RecordStream stream;
  std::vector<double> times;
};

}  // namespace

bool interpolate_gaps(std::vector<double>& series) {
  std::vector<std::size_t> valid;
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (std::isfinite(series[i])) valid.push_back(i);
  }
  if (valid.empty()) return series.empty();
  if (valid.size() == series.size()) return true;
  for (std::size_t i = 0; i < valid.front(); ++i) series[i] = series[valid.front()];
  for (std::size_t i = valid.back() + 1; i < series.size(); ++i) series[i] = series[valid.back()];
  for (std::size_t k = 0; k + 1 < valid.size(); ++k) {
    const std::size_t a = valid[k], b = valid[k + 1];
    for (std::size_t i = a + 1; i < b; ++i) {
      const double w = static_cast<double>(i - a) / static_cast<double>(b - a);
      series[i] = (1.0 - w) * series[a] + w * series[b];
    }
  }
  return true;
}

std::vector<RecordStream> load_canonical_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());

  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  std::vector<std::string> channel_names;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cols = split(line, ',');
    if (cols.size() < 4 || cols[0] != "subject" || cols[1] != "activity" || cols[2] != "t") {
      throw DataError(where(path, line_no) + "malformed header, expected subject,activity,t,<channels...>");
    }
    for (std::size_t i = 3; i < cols.size(); ++i) {
      if (cols[i].empty()) throw DataError(where(path, line_no) + "malformed header, empty channel name");
      channel_names.emplace_back(cols[i]);
    }
    if (std::set<std::string>(channel_names.begin(), channel_names.end()).size() != channel_names.size()) {
      throw DataError(where(path, line_no) + "malformed header, duplicate channel name");
    }
    have_header = true;
    break;
  }
  if (!have_header) return {};

  const std::size_t C = channel_names.size();
  std::map<int, PendingStream> by_subject;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cols = split(line, ',');
    if (cols.size() != C + 3) {
      throw DataError(where(path, line_no) + "expected " + std::to_string(C + 3) + " columns, found " +
                      std::to_string(cols.size()));
    }
    int subject = 0, activity = 0;
    double t = 0.0;
    if (!parse_int(cols[0], subject)) throw DataError(where(path, line_no) + "bad subject id");
    if (!parse_int(cols[1], activity)) throw DataError(where(path, line_no) + "bad activity id");
    if (!parse_cell(cols[2], t) || !std::isfinite(t)) throw DataError(where(path, line_no) + "bad time value");

    auto [it, inserted] = by_subject.try_emplace(subject);
    PendingStream& ps = it->second;
    if (inserted) {
      ps.stream.subject_id = subject;
      ps.stream.channel_names = channel_names;
      ps.stream.channels.assign(C, {});
    }
    if (!ps.times.empty() && !(t > ps.times.back())) {
      throw DataError(where(path, line_no) + "time is not increasing for subject " + std::to_string(subject));
    }
    ps.times.push_back(t);
    ps.stream.labels.push_back(activity);
    for (std::size_t c = 0; c < C; ++c) {
      double v = 0.0;
      if (!parse_cell(cols[c + 3], v)) {
        throw DataError(where(path, line_no) + "non-numeric value in channel " + channel_names[c]);
      }
      ps.stream.channels[c].push_back(v);
    }
  }

  std::vector<RecordStream> out;
  for (auto& [subject, ps] : by_subject) {
    for (std::size_t c = 0; c < C; ++c) {
      if (!interpolate_gaps(ps.stream.channels[c])) {
        throw DataError(path.string() + ": channel " + channel_names[c] + " of subject " + std::to_string(subject) +
                        " has no finite value");
      }
    }
    if (ps.times.size() >= 2) {
      std::vector<double> dt(ps.times.size() - 1);
      for (std::size_t i = 0; i + 1 < ps.times.size(); ++i) dt[i] = ps.times[i + 1] - ps.times[i];
      std::nth_element(dt.begin(), dt.begin() + static_cast<std::ptrdiff_t>(dt.size() / 2), dt.end());
      ps.stream.sample_rate = 1.0 / dt[dt.size() / 2];
    } else {
      ps.stream.sample_rate = 1.0;
    }
    out.push_back(std::move(ps.stream));
  }
  return out;
}

void write_canonical_csv(const std::vector<RecordStream>& streams, const std::filesystem::path& path) {
  std::string text;
  std::vector<std::string> names;
  if (!streams.empty()) names = streams.front().channel_names;
  text += "subject,activity,t";
  for (const auto& n : names) text += "," + n;
  text += '\n';
  for (const RecordStream& s : streams) {
    s.validate();
    if (s.channel_names != names) throw DataError("streams disagree on channel names");
    for (std::size_t t = 0; t < s.length(); ++t) {
      text += std::to_string(s.subject_id) + ',' + std::to_string(s.labels[t]) + ',';
      append_number(text, static_cast<double>(t) / s.sample_rate);
      for (const auto& ch : s.channels) {
        text += ',';
        append_number(text, ch[t]);
      }
      text += '\n';
    }
  }
  io::write_file_atomic(path, text);
}

}  // namespace hargan::data
