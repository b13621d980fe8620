#include "hargan/cli/run_config.hpp"

#include <set>

#include "hargan/core/errors.hpp"
#include "hargan/core/io.hpp"

namespace hargan::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path resolve(const fs::path& p, const fs::path& base) {
  if (p.empty() || p.is_absolute() || base.empty()) return p;
  return base / p;
}

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw UsageError(where + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) throw UsageError("unknown key '" + key + "' in " + where);
  }
}

std::set<std::string> keys_of(const json& j) {
  std::set<std::string> out;
  for (const auto& [key, value] : j.items()) out.insert(key);
  return out;
}

json read_json_file(const fs::path& path) {
  try {
    return json::parse(io::read_file(path));
  } catch (const json::parse_error& e) {
    throw UsageError(path.string() + ": " + e.what());
  }
}

// Training sections take every key of the struct except its seed, which is
// derived from the run seed.
template <typename T>
void read_training(const json& j, T& target, const std::string& where) {
  std::set<std::string> allowed = keys_of(json(target));
  allowed.erase("seed");
  check_keys(j, allowed, where);
  update_from_json(j, target);
}

}  // namespace

data::DatasetProfile resolve_profile(const json& spec, const fs::path& base_dir) {
  if (spec.is_string()) {
    const std::string s = spec.get<std::string>();
    if (s.size() > 5 && s.substr(s.size() - 5) == ".json") {
      const fs::path path = resolve(s, base_dir);
      return resolve_profile(read_json_file(path), path.parent_path());
    }
    return data::profile_by_name(s);
  }
  if (spec.is_object() && spec.contains("preset")) {
    check_keys(spec, {"preset", "activity_ids"}, "profile");
    return data::profile_by_name(spec.at("preset").get<std::string>(),
                                 spec.value("activity_ids", std::vector<int>{}));
  }
  if (spec.is_object()) return data::DatasetProfile::from_json(spec);
  throw UsageError("profile must be a preset name, a JSON file or an object");
}

data::DatasetProfile resolve_profile_arg(const std::string& arg) {
  try {
    return resolve_profile(json(arg));
  } catch (const DataError& e) {
    throw UsageError(std::string("--profile: ") + e.what());
  }
}

std::uint64_t RunConfig::require_seed() const {
  if (!seed) throw UsageError("no seed given (config key 'seed' or --seed)");
  return *seed;
}

const fs::path& RunConfig::require_out() const {
  if (out.empty()) throw UsageError("no output directory given (config key 'out' or --out)");
  return out;
}

const data::DatasetProfile& RunConfig::require_profile() const {
  if (!profile) throw UsageError("no dataset profile given (config key 'profile' or --profile)");
  return *profile;
}

models::ClassifierConfig RunConfig::classifier_config(const data::DatasetProfile& p) const {
  json j = classifier.model;
  j["profile"] = p.to_json();
  return j.get<models::ClassifierConfig>();
}

json RunConfig::gan_model_config(const data::DatasetProfile& p) const {
  json j = gan.model;
  j["profile"] = p.to_json();
  // Round trip through the typed config to fill defaults and validate.
  if (gan.family == models::GanFamily::Rgan) return json(j.get<models::RganConfig>());
  return json(j.get<models::TganConfig>());
}

RunConfig parse_run_config(const json& j, const fs::path& base_dir) {
  RunConfig c;
  c.source = j;
  try {
    check_keys(j, {"version", "seed", "out", "profile", "dataset", "ingest", "classifier", "gan"}, "run config");
    if (!j.contains("version")) throw UsageError("run config has no 'version'");
    c.version = j.at("version").get<int>();
    if (c.version != kConfigVersion) {
      throw UsageError("run config version " + std::to_string(c.version) + " is not supported (expected " +
                       std::to_string(kConfigVersion) + ")");
    }
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("out")) c.out = resolve(j.at("out").get<std::string>(), base_dir);
    if (j.contains("profile")) c.profile = resolve_profile(j.at("profile"), base_dir);

    if (j.contains("dataset")) {
      const json& d = j.at("dataset");
      check_keys(d, {"manifest", "validation_subject"}, "dataset");
      if (d.contains("manifest")) c.manifest = resolve(d.at("manifest").get<std::string>(), base_dir);
      if (d.contains("validation_subject")) c.validation_subject = d.at("validation_subject").get<int>();
    }
    if (j.contains("ingest")) {
      const json& in = j.at("ingest");
      check_keys(in, {"format", "input", "stride"}, "ingest");
      c.ingest.format = in.value("format", std::string{});
      if (in.contains("input")) c.ingest.input = resolve(in.at("input").get<std::string>(), base_dir);
      if (in.contains("stride")) c.ingest.stride = in.at("stride").get<std::size_t>();
    }
    if (j.contains("classifier")) {
      const json& s = j.at("classifier");
      check_keys(s, {"model", "training"}, "classifier");
      if (s.contains("model")) {
        check_keys(s.at("model"), keys_of(json(models::ClassifierConfig{})), "classifier.model");
        c.classifier.model = s.at("model");
        c.classifier.model.erase("profile");
      }
      if (s.contains("training")) read_training(s.at("training"), c.classifier.training, "classifier.training");
    }
    if (j.contains("gan")) {
      const json& s = j.at("gan");
      check_keys(s, {"family", "model", "training", "classifier", "classes"}, "gan");
      if (s.contains("family")) c.gan.family = models::gan_family_from_string(s.at("family").get<std::string>());
      if (s.contains("model")) {
        const json defaults = c.gan.family == models::GanFamily::Rgan ? json(models::RganConfig{}) : json(models::TganConfig{});
        check_keys(s.at("model"), keys_of(defaults), "gan.model");
        c.gan.model = s.at("model");
        c.gan.model.erase("profile");
      }
      if (s.contains("training")) read_training(s.at("training"), c.gan.training, "gan.training");
      if (s.contains("classifier")) c.gan.classifier = resolve(s.at("classifier").get<std::string>(), base_dir);
      if (s.contains("classes")) c.gan.classes = s.at("classes").get<std::vector<int>>();
    }
  } catch (const json::exception& e) {
    throw UsageError(std::string("run config: ") + e.what());
  } catch (const DataError& e) {
    throw UsageError(std::string("run config: ") + e.what());
  }
  return c;
}

RunConfig load_run_config(const fs::path& path) {
  if (!fs::exists(path)) throw UsageError("config file " + path.string() + " does not exist");
  return parse_run_config(read_json_file(path), path.parent_path());
}

json to_json(const RunConfig& c) {
  json j = {{"version", c.version}, {"out", c.out.string()}};
  if (c.seed) j["seed"] = *c.seed;
  if (c.profile) j["profile"] = c.profile->to_json();
  json dataset = json::object();
  if (!c.manifest.empty()) dataset["manifest"] = c.manifest.string();
  if (c.validation_subject) dataset["validation_subject"] = *c.validation_subject;
  j["dataset"] = dataset;
  if (!c.ingest.format.empty()) {
    j["ingest"] = {{"format", c.ingest.format}, {"input", c.ingest.input.string()}};
    if (c.ingest.stride) j["ingest"]["stride"] = *c.ingest.stride;
  }
  json ctrain = c.classifier.training;
  ctrain.erase("seed");
  j["classifier"] = {{"model", c.classifier.model}, {"training", ctrain}};
  json gtrain = c.gan.training;
  gtrain.erase("seed");
  j["gan"] = {{"family", models::to_string(c.gan.family)},
              {"model", c.gan.model},
              {"training", gtrain},
              {"classifier", c.gan.classifier.string()},
              {"classes", c.gan.classes}};
  return j;
}

}  // namespace hargan::cli
