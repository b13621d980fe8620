#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "hargan/data/windows.hpp"
#include "hargan/eval/metrics.hpp"
#include "hargan/models/model.hpp"
#include "hargan/train/optimizer.hpp"
#include "hargan/train/train_log.hpp"

namespace hargan::train {

struct ClassifierTrainConfig {
  std::size_t epochs = 50;
  std::size_t batch_size = 32;
  AdamConfig optimizer = AdamConfig::classifier_defaults();
  std::uint64_t seed = 1;

  void validate() const;
};

void to_json(nlohmann::json& j, const ClassifierTrainConfig& c);
void update_from_json(const nlohmann::json& j, ClassifierTrainConfig& c);

struct ClassifierTrainResult {
  std::vector<ClassifierEpoch> log;
  eval::EvaluationReport report;  // validation split, best snapshot
  std::size_t best_epoch = 0;     // 0: the initial parameters were kept
};

/// Mini-batch cross-entropy training. After every epoch the validation
/// macro-F1 is measured; the model is left holding the parameters of the
/// best epoch, ties going to the lower validation loss. Throws DataError on an empty split and
/// NumericalError on a non-finite loss.
ClassifierTrainResult train_classifier(models::Classifier& model, const data::WindowedDataset& train,
                                       const data::WindowedDataset& val, const ClassifierTrainConfig& config);

eval::EvaluationReport evaluate_classifier(const models::Classifier& model, const data::WindowedDataset& ds);
// Mean cross-entropy in eval mode.
double classifier_loss(const models::Classifier& model, const data::WindowedDataset& ds);

}  // namespace hargan::train
