#include "hargan/train/gan_trainer.hpp"

#include <chrono>
#include <numeric>
#include <cmath>

#include "hargan/core/errors.hpp"
#include "hargan/core/ops.hpp"
#include "hargan/eval/metrics.hpp"
#include "hargan/nn/losses.hpp"

namespace hargan::train {

void GanTrainConfig::validate() const {
  if (batch_size == 0) throw DataError("batch_size must be >= 1");
  if (discriminator_steps == 0) throw DataError("discriminator_steps must be >= 1");
  if (gate_interval == 0) throw DataError("gate_interval must be >= 1");
  if (gate_samples == 0) throw DataError("gate_samples must be >= 1");
  if (!(gate_threshold > 0.0 && gate_threshold <= 1.0)) throw DataError("gate_threshold must lie in (0, 1]");
  if (collapse_window == 0) throw DataError("collapse_window must be >= 1");
  generator_optimizer.validate();
  discriminator_optimizer.validate();
}

void to_json(nlohmann::json& j, const GanTrainConfig& c) {
  j = {{"max_epochs", c.max_epochs},
       {"batch_size", c.batch_size},
       {"generator_optimizer", c.generator_optimizer},
       {"discriminator_optimizer", c.discriminator_optimizer},
       {"discriminator_steps", c.discriminator_steps},
       {"gate_interval", c.gate_interval},
       {"gate_samples", c.gate_samples},
       {"gate_threshold", c.gate_threshold},
       {"collapse_window", c.collapse_window},
       {"collapse_epsilon", c.collapse_epsilon},
       {"stop_on_collapse", c.stop_on_collapse},
       {"seed", c.seed}};
}

void update_from_json(const nlohmann::json& j, GanTrainConfig& c) {
  c.max_epochs = j.value("max_epochs", c.max_epochs);
  c.batch_size = j.value("batch_size", c.batch_size);
  if (j.contains("generator_optimizer")) update_from_json(j.at("generator_optimizer"), c.generator_optimizer);
  if (j.contains("discriminator_optimizer")) update_from_json(j.at("discriminator_optimizer"), c.discriminator_optimizer);
  c.discriminator_steps = j.value("discriminator_steps", c.discriminator_steps);
  c.gate_interval = j.value("gate_interval", c.gate_interval);
  c.gate_samples = j.value("gate_samples", c.gate_samples);
  c.gate_threshold = j.value("gate_threshold", c.gate_threshold);
  c.collapse_window = j.value("collapse_window", c.collapse_window);
  c.collapse_epsilon = j.value("collapse_epsilon", c.collapse_epsilon);
  c.stop_on_collapse = j.value("stop_on_collapse", c.stop_on_collapse);
  c.seed = j.value("seed", c.seed);
  c.validate();
}

bool CollapseDetector::update(double d_loss) {
  run_ = d_loss < epsilon_ ? run_ + 1 : 0;
  if (run_ >= window_) collapsed_ = true;
  return collapsed_;
}

double validation_gate(const models::Generator& generator, const models::Classifier& classifier,
                       std::size_t class_index, std::size_t n_samples, Rng& rng) {
  NoGradGuard guard;
  const Tensor windows = generator.sample(n_samples, rng);
  const auto pred = classifier.predict(windows);
  const std::vector<std::size_t> truth(n_samples, class_index);
  return eval::binary_f1(pred, truth, class_index);
}

namespace {

void require_finite(double loss, const char* which, std::size_t epoch) {
  if (!std::isfinite(loss)) {
    throw NumericalError(std::string(which) + " loss became non-finite at epoch " + std::to_string(epoch));
  }
}

}  // namespace

double discriminator_step(const models::Generator& generator, models::Discriminator& discriminator, Adam& optimizer,
                          const Tensor& real, Rng& rng, const nn::ForwardContext& ctx) {
  Tensor fake;
  {
    NoGradGuard no_grad;
    fake = generator.sample(real.size(0), rng, ctx);
  }
  Tensor loss = nn::bce_with_logits(discriminator.forward(real, ctx), 1.0) +
                nn::bce_with_logits(discriminator.forward(fake, ctx), 0.0);
  if (!std::isfinite(loss.item())) return loss.item();
  loss.backward();
  optimizer.step();
  return loss.item();
}

double generator_step(models::Generator& generator, models::Discriminator& discriminator, Adam& optimizer,
                      std::size_t n, Rng& rng, const nn::ForwardContext& ctx) {
  Tensor loss = nn::bce_with_logits(discriminator.forward(generator.sample(n, rng, ctx), ctx), 1.0);
  if (!std::isfinite(loss.item())) return loss.item();
  loss.backward();
  optimizer.step();
  discriminator.params().clear_grads();
  return loss.item();
}

GanSession::GanSession(models::Generator& generator, models::Discriminator& discriminator,
                       const data::WindowedDataset& class_windows, const models::Classifier* classifier,
                       const GanTrainConfig& config)
    : generator_(generator),
      discriminator_(discriminator),
      windows_(class_windows),
      classifier_(classifier),
      config_(config),
      rng_(config.seed),
      gate_rng_(rng_.fork()),
      g_opt_(generator.params(), config.generator_optimizer),
      d_opt_(discriminator.params(), config.discriminator_optimizer) {
  config_.validate();
  if (windows_.empty()) throw DataError("GAN training needs at least one window of the class");
  const int activity = windows_.windows.front().label;
  for (const auto& w : windows_.windows) {
    if (w.label != activity) throw DataError("GAN training windows must all share one class label");
  }
  const auto& p = generator.profile();
  if (p.channels != windows_.profile.channels || p.length != windows_.profile.length) {
    throw ShapeError("generator and data windows disagree on shape");
  }
  if (classifier_) {
    const auto index = classifier_->profile().class_index(activity);
    if (!index) throw DataError("activity " + std::to_string(activity) + " is unknown to the validation classifier");
    class_index_ = *index;
  }
  generator.params().clear_grads();
  discriminator.params().clear_grads();
}

TrainLogEntry GanSession::run_epoch() {
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  const std::size_t epoch = ++epoch_;
  nn::ForwardContext ctx{nn::Mode::Train, &rng_};
  const std::size_t B = config_.batch_size;

  std::vector<std::size_t> order(windows_.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng_.shuffle(order);
  double d_sum = 0.0, g_sum = 0.0;
  std::size_t batches = 0;
  for (std::size_t begin = 0; begin < order.size(); begin += B) {
    const std::size_t n = std::min(B, order.size() - begin);
    const Tensor real = windows_.batch(std::span(order).subspan(begin, n));
    for (std::size_t s = 0; s < config_.discriminator_steps; ++s) {
      const double d_loss = discriminator_step(generator_, discriminator_, d_opt_, real, rng_, ctx);
      require_finite(d_loss, "discriminator", epoch);
      if (s + 1 == config_.discriminator_steps) d_sum += d_loss;
    }
    const double g_loss = generator_step(generator_, discriminator_, g_opt_, n, rng_, ctx);
    require_finite(g_loss, "generator", epoch);
    g_sum += g_loss;
    ++batches;
  }

  TrainLogEntry entry{epoch, d_sum / static_cast<double>(batches), g_sum / static_cast<double>(batches), 0.0,
                      std::nullopt};
  if (classifier_ && epoch % config_.gate_interval == 0) {
    entry.gate_f1 = validation_gate(generator_, *classifier_, class_index_, config_.gate_samples, gate_rng_);
  }
  entry.seconds = std::chrono::duration<double>(clock::now() - start).count();
  return entry;
}

GanTrainResult train_gan(models::Generator& generator, models::Discriminator& discriminator,
                         const data::WindowedDataset& class_windows, const models::Classifier& classifier,
                         const GanTrainConfig& config, const EpochCallback& on_epoch) {
  using clock = std::chrono::steady_clock;
  const auto run_start = clock::now();
  GanSession session(generator, discriminator, class_windows, &classifier, config);
  CollapseDetector collapse(config.collapse_window, config.collapse_epsilon);

  GanTrainResult result;
  while (session.epoch() < config.max_epochs) {
    const TrainLogEntry entry = session.run_epoch();
    result.log.entries.push_back(entry);
    if (on_epoch) on_epoch(entry);

    if (entry.gate_f1 && *entry.gate_f1 >= config.gate_threshold) {
      result.converged = true;
      result.converged_epoch = entry.epoch;
      break;
    }
    if (collapse.update(entry.d_loss)) {
      result.collapsed = true;
      if (config.stop_on_collapse) break;
    }
  }
  result.best_gate_f1 = result.log.best_gate_f1();
  result.total_seconds = std::chrono::duration<double>(clock::now() - run_start).count();
  return result;
}

}  // namespace hargan::train
