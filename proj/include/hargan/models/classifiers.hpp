#pragma once

#include <vector>

#include "hargan/models/config.hpp"
#include "hargan/models/model.hpp"
#include "hargan/models/tgan.hpp"
#include "hargan/nn/lstm.hpp"

namespace hargan::models {

/// Length-preserving convolutions with relu -> LSTM over time -> dropout on
/// the final hidden state -> dense layer to N logits.
class ConvLstmClassifier : public Classifier {
 public:
  ConvLstmClassifier(const ClassifierConfig& config, Rng& rng);

  Architecture architecture() const override { return Architecture::ConvLstmClassifier; }
  nlohmann::json config() const override { return config_; }
  const data::DatasetProfile& profile() const override { return config_.profile; }
  Tensor forward(const Tensor& x, const nn::ForwardContext& ctx = {}) const override;

 private:
  ClassifierConfig config_;
  std::vector<nn::Conv1d> convs_;
  nn::Lstm lstm_;
  nn::Linear head_;
};

/// Projection + positional encoding -> encoder stack -> mean over positions
/// -> dropout -> dense layer to N logits.
class TransformerClassifier : public Classifier {
 public:
  TransformerClassifier(const ClassifierConfig& config, Rng& rng);

  Architecture architecture() const override { return Architecture::TransformerClassifier; }
  nlohmann::json config() const override { return config_; }
  const data::DatasetProfile& profile() const override { return config_.profile; }
  Tensor forward(const Tensor& x, const nn::ForwardContext& ctx = {}) const override;

 private:
  ClassifierConfig config_;
  EncoderTrunk trunk_;
  nn::Linear head_;
};

}  // namespace hargan::models
