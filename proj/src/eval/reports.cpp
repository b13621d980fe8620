#include "hargan/eval/reports.hpp"

#include <charconv>

#include "hargan/core/io.hpp"

namespace hargan::eval {

namespace {

std::string num(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string name_of(const std::vector<std::string>& names, std::size_t i) {
  return i < names.size() ? names[i] : std::to_string(i);
}

}  // namespace

std::string per_class_csv(const EvaluationReport& r, const std::vector<std::string>& class_names) {
  std::string out = "class,f1,support\n";
  for (std::size_t k = 0; k < r.num_classes(); ++k) {
    std::size_t support = 0;
    for (std::size_t v : r.confusion[k]) support += v;
    out += name_of(class_names, k) + "," + num(r.per_class_f1[k]) + "," + std::to_string(support) + "\n";
  }
  out += "macro," + num(r.macro_f1) + "," + std::to_string(r.total()) + "\n";
  return out;
}

std::string confusion_csv(const EvaluationReport& r, bool percent, const std::vector<std::string>& class_names) {
  const auto pct = r.confusion_percent();
  std::string out = "true\\predicted";
  for (std::size_t j = 0; j < r.num_classes(); ++j) out += "," + name_of(class_names, j);
  out += "\n";
  for (std::size_t i = 0; i < r.num_classes(); ++i) {
    out += name_of(class_names, i);
    for (std::size_t j = 0; j < r.num_classes(); ++j) {
      out += "," + (percent ? num(pct[i][j]) : std::to_string(r.confusion[i][j]));
    }
    out += "\n";
  }
  return out;
}

std::string correlation_csv(const CorrelationReport& r) {
  std::string out = "class_id,channel,r,pass,sample_count\n";
  for (const auto& row : r.rows) {
    for (std::size_t c = 0; c < row.r.size(); ++c) {
      out += std::to_string(row.class_id) + "," + name_of(r.channel_names, c) + "," +
             (row.undefined[c] ? std::string("nan") : num(row.r[c])) + "," + (row.pass[c] ? "1" : "0") + "," +
             std::to_string(row.sample_count) + "\n";
    }
  }
  return out;
}

void write_json(const nlohmann::json& j, const std::filesystem::path& path) {
  io::write_file_atomic(path, j.dump(2) + "\n");
}

void write_evaluation(const EvaluationReport& r, const std::filesystem::path& dir, const std::string& stem,
                      const std::vector<std::string>& class_names) {
  nlohmann::json j = r.to_json();
  if (!class_names.empty()) j["classes"] = class_names;
  write_json(j, dir / (stem + ".json"));
  io::write_file_atomic(dir / (stem + "_per_class.csv"), per_class_csv(r, class_names));
  io::write_file_atomic(dir / (stem + "_confusion.csv"), confusion_csv(r, false, class_names));
  io::write_file_atomic(dir / (stem + "_confusion_percent.csv"), confusion_csv(r, true, class_names));
}

void write_correlation(const CorrelationReport& r, const std::filesystem::path& dir, const std::string& stem) {
  write_json(r.to_json(), dir / (stem + ".json"));
  io::write_file_atomic(dir / (stem + ".csv"), correlation_csv(r));
}

}  // namespace hargan::eval
