#include "hargan/models/checkpoint.hpp"

#include <sstream>

#include "hargan/core/errors.hpp"
#include "hargan/core/io.hpp"
#include "hargan/models/factory.hpp"

namespace hargan::models {

using nlohmann::json;

namespace {

constexpr const char* kFormatTag = "hargan-checkpoint";

template <typename T>
std::unique_ptr<T> downcast(LoadedCheckpoint loaded, const std::filesystem::path& path, const char* kind,
                            json* metadata) {
  auto* raw = dynamic_cast<T*>(loaded.model.get());
  if (!raw) throw DataError(path.string() + " does not hold a " + kind);
  if (metadata) *metadata = std::move(loaded.metadata);
  loaded.model.release();
  return std::unique_ptr<T>(raw);
}

}  // namespace

void save_checkpoint(const Model& model, const std::filesystem::path& path, const json& metadata) {
  json tensors = json::array();
  for (const auto& [name, t] : model.params().entries()) tensors.push_back({{"name", name}, {"shape", t.shape()}});
  const json header = {{"format", kFormatTag},
                       {"format_version", kCheckpointVersion},
                       {"architecture", to_string(model.architecture())},
                       {"config", model.config()},
                       {"tensors", tensors},
                       {"metadata", metadata}};
  std::ostringstream out;
  out << header.dump() << '\n';
  for (const auto& [name, t] : model.params().entries()) io::write_f64_le(out, t.data());
  io::write_file_atomic(path, out.str());
}

LoadedCheckpoint load_checkpoint(const std::filesystem::path& path) {
  const std::string bytes = io::read_file(path);
  const std::size_t newline = bytes.find('\n');
  if (newline == std::string::npos) throw DataError(path.string() + ": missing checkpoint header");
  json header;
  try {
    header = json::parse(bytes.substr(0, newline));
  } catch (const json::parse_error& e) {
    throw DataError(path.string() + ": bad checkpoint header: " + e.what());
  }

  LoadedCheckpoint out;
  try {
    if (header.at("format").get<std::string>() != kFormatTag) throw DataError(path.string() + " is not a checkpoint");
    const int version = header.at("format_version").get<int>();
    if (version != kCheckpointVersion) {
      throw DataError(path.string() + ": checkpoint format version " + std::to_string(version) + ", expected " +
                      std::to_string(kCheckpointVersion));
    }
    Rng init(0);
    out.model = build_model(architecture_from_string(header.at("architecture").get<std::string>()),
                            header.at("config"), init);
    out.metadata = header.value("metadata", json::object());

    const auto& table = header.at("tensors");
    const auto& entries = out.model->params().entries();
    if (table.size() != entries.size()) throw DataError(path.string() + ": tensor table does not match architecture");
    std::istringstream in(bytes.substr(newline + 1));
    for (std::size_t i = 0; i < entries.size(); ++i) {
      Tensor t = entries[i].second;
      if (table[i].at("name").get<std::string>() != entries[i].first ||
          table[i].at("shape").get<Shape>() != t.shape()) {
        throw DataError(path.string() + ": tensor '" + table[i].at("name").get<std::string>() +
                        "' does not match the architecture");
      }
      io::read_f64_le(in, t.mutable_data());
    }
    if (in.peek() != std::char_traits<char>::eof()) throw DataError(path.string() + ": trailing bytes after tensors");
  } catch (const json::exception& e) {
    throw DataError(path.string() + ": bad checkpoint header: " + e.what());
  }
  return out;
}

std::unique_ptr<Generator> load_generator(const std::filesystem::path& path, json* metadata) {
  return downcast<Generator>(load_checkpoint(path), path, "generator", metadata);
}

std::unique_ptr<Classifier> load_classifier(const std::filesystem::path& path, json* metadata) {
  return downcast<Classifier>(load_checkpoint(path), path, "classifier", metadata);
}

}  // namespace hargan::models
