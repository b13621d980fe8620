#include "hargan/train/classifier_trainer.hpp"

#include <chrono>
#include <cmath>
#include <numeric>

#include "hargan/core/errors.hpp"
#include "hargan/core/ops.hpp"
#include "hargan/nn/losses.hpp"

namespace hargan::train {

void ClassifierTrainConfig::validate() const {
  if (batch_size == 0) throw DataError("batch_size must be >= 1");
  optimizer.validate();
}

void to_json(nlohmann::json& j, const ClassifierTrainConfig& c) {
  j = {{"epochs", c.epochs}, {"batch_size", c.batch_size}, {"optimizer", c.optimizer}, {"seed", c.seed}};
}

void update_from_json(const nlohmann::json& j, ClassifierTrainConfig& c) {
  c.epochs = j.value("epochs", c.epochs);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.seed = j.value("seed", c.seed);
  if (j.contains("optimizer")) update_from_json(j.at("optimizer"), c.optimizer);
  c.validate();
}

eval::EvaluationReport evaluate_classifier(const models::Classifier& model, const data::WindowedDataset& ds) {
  const auto truth = data::class_indices(ds);
  const auto pred = ds.empty() ? std::vector<std::size_t>{} : model.predict(ds.all());
  return eval::f1_and_confusion(pred, truth, model.num_classes());
}

double classifier_loss(const models::Classifier& model, const data::WindowedDataset& ds) {
  if (ds.empty()) return 0.0;
  NoGradGuard guard;
  const auto truth = data::class_indices(ds);
  return nn::cross_entropy(model.forward(ds.all()), truth).item();
}

ClassifierTrainResult train_classifier(models::Classifier& model, const data::WindowedDataset& train,
                                       const data::WindowedDataset& val, const ClassifierTrainConfig& config) {
  config.validate();
  if (train.empty()) throw DataError("classifier training split is empty");
  if (val.empty()) throw DataError("classifier validation split is empty");
  const auto labels = data::class_indices(train);

  Rng rng(config.seed);
  Adam opt(model.params(), config.optimizer);
  ClassifierTrainResult result;
  result.report = evaluate_classifier(model, val);
  double best_f1 = result.report.macro_f1;
  double best_loss = classifier_loss(model, val);
  models::ParamSnapshot best = models::snapshot(model.params());

  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  using clock = std::chrono::steady_clock;
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    const auto start = clock::now();
    rng.shuffle(order);
    double loss_sum = 0.0;
    for (std::size_t b = 0; b < order.size(); b += config.batch_size) {
      const std::size_t n = std::min(config.batch_size, order.size() - b);
      const std::span<const std::size_t> idx(order.data() + b, n);
      std::vector<std::size_t> y(n);
      for (std::size_t i = 0; i < n; ++i) y[i] = labels[idx[i]];
      nn::ForwardContext ctx{nn::Mode::Train, &rng};
      Tensor loss = nn::cross_entropy(model.forward(train.batch(idx), ctx), y);
      if (!std::isfinite(loss.item())) {
        throw NumericalError("classifier loss became non-finite at epoch " + std::to_string(epoch));
      }
      loss.backward();
      opt.step();
      loss_sum += loss.item() * static_cast<double>(n);
    }
    const auto report = evaluate_classifier(model, val);
    const double val_loss = classifier_loss(model, val);
    if (report.macro_f1 > best_f1 || (report.macro_f1 == best_f1 && val_loss < best_loss)) {
      best_f1 = report.macro_f1;
      best_loss = val_loss;
      best = models::snapshot(model.params());
      result.best_epoch = epoch;
      result.report = report;
    }
    result.log.push_back({epoch, loss_sum / static_cast<double>(train.size()), val_loss, report.macro_f1,
                          std::chrono::duration<double>(clock::now() - start).count()});
  }
  models::restore(model.params(), best);
  return result;
}

}  // namespace hargan::train
