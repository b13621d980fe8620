#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace hargan::train {

struct TrainLogEntry {
  std::size_t epoch = 0;  // 1-based
  double d_loss = 0.0;
  double g_loss = 0.0;
  double seconds = 0.0;
  std::optional<double> gate_f1;
};

/// Per-epoch GAN record, persisted as `epoch,d_loss,g_loss,seconds,gate_f1`
/// with an empty gate_f1 field on epochs without a gate. Values are written
/// in shortest round-trip form.
struct TrainLog {
  std::vector<TrainLogEntry> entries;

  std::size_t size() const { return entries.size(); }
  double total_seconds() const;
  std::optional<double> best_gate_f1() const;

  // With include_seconds = false the seconds field is left empty; every
  // other byte is a pure function of the run's configuration and seed.
  std::string to_csv(bool include_seconds = true) const;
  static TrainLog from_csv(const std::string& text);
};

struct ClassifierEpoch {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
  double val_macro_f1 = 0.0;
  double seconds = 0.0;
};

// `epoch,train_loss,val_loss,val_macro_f1,seconds`
std::string classifier_log_csv(const std::vector<ClassifierEpoch>& log, bool include_seconds = true);

}  // namespace hargan::train
