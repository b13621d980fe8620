#include "hargan/data/dataset_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "hargan/core/errors.hpp"
#include "hargan/core/io.hpp"
#include "json.hpp"

namespace hargan::data {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kManifestName = "manifest.json";
constexpr const char* kFormatTag = "hargan-windows";

std::string shard_name(std::size_t k) { return "windows_" + std::to_string(k) + ".bin"; }

}  // namespace

fs::path save_windowed(const WindowedDataset& ds, const fs::path& directory, const std::optional<NormStats>& stats) {
  const std::size_t C = ds.profile.channels, L = ds.profile.length;
  fs::create_directories(directory);

  json files = json::array();
  std::vector<int> labels, subjects;
  std::size_t begin = 0;
  while (begin < ds.size()) {
    std::size_t end = begin;
    while (end < ds.size() && ds.windows[end].subject_id == ds.windows[begin].subject_id) ++end;
    std::ostringstream bin;
    for (std::size_t i = begin; i < end; ++i) {
      const auto& w = ds.windows[i];
      if (w.data.shape() != Shape{C, L}) {
        throw ShapeError("window " + std::to_string(i) + " has shape " + shape_to_string(w.data.shape()) +
                         ", profile expects " + shape_to_string({C, L}));
      }
      io::write_f64_le(bin, w.data.data());
      labels.push_back(w.label);
      subjects.push_back(w.subject_id);
    }
    const std::string name = shard_name(files.size());
    io::write_file_atomic(directory / name, bin.str());
    files.push_back({{"path", name}, {"count", end - begin}});
    begin = end;
  }

  json manifest = {{"format", kFormatTag},
                   {"version", kManifestVersion},
                   {"profile", ds.profile.to_json()},
                   {"shape", {C, L}},
                   {"count", ds.size()},
                   {"files", files},
                   {"labels", labels},
                   {"subjects", subjects},
                   {"normalization", nullptr}};
  if (stats) manifest["normalization"] = {{"mean", stats->mean}, {"stddev", stats->stddev}};
  const fs::path manifest_path = directory / kManifestName;
  io::write_file_atomic(manifest_path, manifest.dump(2) + "\n");

  // Shards left over from an earlier, larger dataset in the same directory.
  for (std::size_t k = files.size();; ++k) {
    if (!fs::remove(directory / shard_name(k))) break;
  }
  return manifest_path;
}

LoadedDataset load_windowed(const fs::path& path) {
  const fs::path manifest_path = fs::is_directory(path) ? path / kManifestName : path;
  const fs::path dir = manifest_path.parent_path();
  json m;
  try {
    m = json::parse(io::read_file(manifest_path));
  } catch (const json::parse_error& e) {
    throw DataError(manifest_path.string() + ": " + e.what());
  }

  LoadedDataset out;
  try {
    if (m.at("format").get<std::string>() != kFormatTag) throw DataError(manifest_path.string() + " is not a window manifest");
    const int version = m.at("version").get<int>();
    if (version != kManifestVersion) {
      throw DataError(manifest_path.string() + ": manifest version " + std::to_string(version) + " is not supported");
    }
    out.dataset.profile = DatasetProfile::from_json(m.at("profile"));
    const std::size_t C = out.dataset.profile.channels, L = out.dataset.profile.length;
    if (m.at("shape") != json{C, L}) throw DataError(manifest_path.string() + ": shape disagrees with profile");
    const auto labels = m.at("labels").get<std::vector<int>>();
    const auto subjects = m.at("subjects").get<std::vector<int>>();
    const std::size_t count = m.at("count").get<std::size_t>();
    if (labels.size() != count || subjects.size() != count) {
      throw DataError(manifest_path.string() + ": label/subject lists do not match the window count");
    }
    std::size_t i = 0;
    for (const auto& f : m.at("files")) {
      const fs::path file = dir / f.at("path").get<std::string>();
      const std::size_t n = f.at("count").get<std::size_t>();
      std::ifstream in(file, std::ios::binary);
      if (!in) throw DataError("missing window file " + file.string());
      for (std::size_t k = 0; k < n; ++k, ++i) {
        if (i >= count) throw DataError(manifest_path.string() + ": files hold more windows than declared");
        std::vector<double> v(C * L);
        io::read_f64_le(in, v);
        out.dataset.windows.push_back({Tensor({C, L}, std::move(v)), labels[i], subjects[i]});
      }
    }
    if (i != count) throw DataError(manifest_path.string() + ": files hold fewer windows than declared");
    if (!m.at("normalization").is_null()) {
      NormStats s;
      s.mean = m["normalization"].at("mean").get<std::vector<double>>();
      s.stddev = m["normalization"].at("stddev").get<std::vector<double>>();
      if (s.mean.size() != C || s.stddev.size() != C) throw DataError(manifest_path.string() + ": bad normalization block");
      out.stats = std::move(s);
    }
  } catch (const json::exception& e) {
    throw DataError(manifest_path.string() + ": " + e.what());
  }
  return out;
}

}  // namespace hargan::data
