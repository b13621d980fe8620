#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>

#include "hargan/data/windows.hpp"
#include "hargan/models/model.hpp"
#include "hargan/train/optimizer.hpp"
#include "hargan/train/train_log.hpp"

namespace hargan::train {

struct GanTrainConfig {
  std::size_t max_epochs = 2000;
  std::size_t batch_size = 32;
  AdamConfig generator_optimizer = AdamConfig::gan_defaults();
  AdamConfig discriminator_optimizer = AdamConfig::gan_defaults();
  std::size_t discriminator_steps = 1;  // per generator step
  std::size_t gate_interval = 25;
  std::size_t gate_samples = 128;
  double gate_threshold = 0.95;
  std::size_t collapse_window = 50;
  double collapse_epsilon = 1e-3;
  bool stop_on_collapse = true;
  std::uint64_t seed = 1;

  void validate() const;
};

void to_json(nlohmann::json& j, const GanTrainConfig& c);
void update_from_json(const nlohmann::json& j, GanTrainConfig& c);

/// Flags collapse once the discriminator loss has stayed below `epsilon`
/// for `window` consecutive epochs.
class CollapseDetector {
 public:
  CollapseDetector(std::size_t window, double epsilon) : window_(window), epsilon_(epsilon) {}
  // Returns true from the epoch on which the run of low losses reaches `window`.
  bool update(double d_loss);
  bool collapsed() const { return collapsed_; }

 private:
  std::size_t window_;
  double epsilon_;
  std::size_t run_ = 0;
  bool collapsed_ = false;
};

struct GanTrainResult {
  TrainLog log;
  bool converged = false;  // some gate reached the threshold
  bool collapsed = false;
  std::optional<std::size_t> converged_epoch;
  std::optional<double> best_gate_f1;
  double total_seconds = 0.0;
};

using EpochCallback = std::function<void(const TrainLogEntry&)>;

/// F1 of `class_index` (positive) against all other classes over the
/// classifier's predictions for n generated windows; every generated window
/// is meant to belong to `class_index`.
double validation_gate(const models::Generator& generator, const models::Classifier& classifier,
                       std::size_t class_index, std::size_t n_samples, Rng& rng);

// One discriminator update: `real` labelled 1 against as many generated
// windows labelled 0. Generator parameters and gradients are not touched.
// Returns the loss; a non-finite loss is returned without updating.
double discriminator_step(const models::Generator& generator, models::Discriminator& discriminator, Adam& optimizer,
                          const Tensor& real, Rng& rng, const nn::ForwardContext& ctx);
// One generator update through the discriminator with the non-saturating
// loss on n generated windows. The discriminator's gradients are discarded.
double generator_step(models::Generator& generator, models::Discriminator& discriminator, Adam& optimizer,
                      std::size_t n, Rng& rng, const nn::ForwardContext& ctx);

/// Training state of one class-GAN, advanced one epoch at a time. An epoch
/// is one shuffled pass over the class windows in batches. Without a
/// classifier no gate is ever run.
class GanSession {
 public:
  GanSession(models::Generator& generator, models::Discriminator& discriminator,
             const data::WindowedDataset& class_windows, const models::Classifier* classifier,
             const GanTrainConfig& config);

  TrainLogEntry run_epoch();
  std::size_t epoch() const { return epoch_; }

 private:
  models::Generator& generator_;
  models::Discriminator& discriminator_;
  const data::WindowedDataset& windows_;
  const models::Classifier* classifier_;
  GanTrainConfig config_;
  Rng rng_;
  Rng gate_rng_;
  Adam g_opt_;
  Adam d_opt_;
  std::size_t class_index_ = 0;
  std::size_t epoch_ = 0;
};

/// Alternating adversarial training on the windows of one class. An epoch
/// is one shuffled pass over the windows in batches; each batch runs
/// discriminator_steps discriminator updates (real batch labelled 1,
/// generated batch labelled 0, generator untouched) followed by one
/// generator update through the discriminator with the non-saturating loss
/// (discriminator untouched). Every gate_interval epochs the frozen
/// classifier scores gate_samples generated windows; training stops at the
/// first gate at or above gate_threshold.
GanTrainResult train_gan(models::Generator& generator, models::Discriminator& discriminator,
                         const data::WindowedDataset& class_windows, const models::Classifier& classifier,
                         const GanTrainConfig& config, const EpochCallback& on_epoch = {});

}  // namespace hargan::train
