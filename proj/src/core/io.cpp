#include "hargan/core/io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "hargan/core/errors.hpp"

namespace hargan::io {

namespace {

std::uint64_t to_little(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    std::uint64_t r = 0;
    for (int i = 0; i < 8; ++i) r |= ((v >> (8 * i)) & 0xFFu) << (8 * (7 - i));
    return r;
  }
}

}  // namespace

void write_f64_le(std::ostream& out, std::span<const double> values) {
  std::vector<std::uint64_t> buffer(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) buffer[i] = to_little(std::bit_cast<std::uint64_t>(values[i]));
  out.write(reinterpret_cast<const char*>(buffer.data()), static_cast<std::streamsize>(buffer.size() * 8));
}

void read_f64_le(std::istream& in, std::span<double> values) {
  std::vector<std::uint64_t> buffer(values.size());
  in.read(reinterpret_cast<char*>(buffer.data()), static_cast<std::streamsize>(buffer.size() * 8));
  if (static_cast<std::size_t>(in.gcount()) != buffer.size() * 8) throw DataError("truncated binary payload");
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = std::bit_cast<double>(to_little(buffer[i]));
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw DataError("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace hargan::io
