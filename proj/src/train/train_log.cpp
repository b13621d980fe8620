#include "hargan/train/train_log.hpp"

#include <charconv>
#include <sstream>

#include "hargan/core/errors.hpp"

namespace hargan::train {

namespace {

std::string num(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

double parse(const std::string& s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw DataError("bad number '" + s + "' in train log");
  return v;
}

constexpr const char* kHeader = "epoch,d_loss,g_loss,seconds,gate_f1";

}  // namespace

double TrainLog::total_seconds() const {
  double s = 0.0;
  for (const auto& e : entries) s += e.seconds;
  return s;
}

std::optional<double> TrainLog::best_gate_f1() const {
  std::optional<double> best;
  for (const auto& e : entries) {
    if (e.gate_f1 && (!best || *e.gate_f1 > *best)) best = e.gate_f1;
  }
  return best;
}

std::string TrainLog::to_csv(bool include_seconds) const {
  std::string out = std::string(kHeader) + "\n";
  for (const auto& e : entries) {
    out += std::to_string(e.epoch) + "," + num(e.d_loss) + "," + num(e.g_loss) + "," +
           (include_seconds ? num(e.seconds) : std::string()) + "," + (e.gate_f1 ? num(*e.gate_f1) : std::string()) +
           "\n";
  }
  return out;
}

TrainLog TrainLog::from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kHeader) throw DataError("train log has an unexpected header");
  TrainLog log;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    if (line.back() == ',') f.emplace_back();
    if (f.size() != 5) throw DataError("train log row with " + std::to_string(f.size()) + " fields");
    TrainLogEntry e;
    e.epoch = static_cast<std::size_t>(parse(f[0]));
    e.d_loss = parse(f[1]);
    e.g_loss = parse(f[2]);
    e.seconds = f[3].empty() ? 0.0 : parse(f[3]);
    if (!f[4].empty()) e.gate_f1 = parse(f[4]);
    log.entries.push_back(e);
  }
  return log;
}

std::string classifier_log_csv(const std::vector<ClassifierEpoch>& log, bool include_seconds) {
  std::string out = "epoch,train_loss,val_loss,val_macro_f1,seconds\n";
  for (const auto& e : log) {
    out += std::to_string(e.epoch) + "," + num(e.train_loss) + "," + num(e.val_loss) + "," + num(e.val_macro_f1) + "," +
           (include_seconds ? num(e.seconds) : std::string()) + "\n";
  }
  return out;
}

}  // namespace hargan::train
