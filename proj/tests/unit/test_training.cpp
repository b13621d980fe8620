#include <cmath>
#include <limits>
#include <numeric>

#include "doctest.h"
#include "hargan/core/errors.hpp"
#include "hargan/core/ops.hpp"
#include "hargan/data/toy_corpus.hpp"
#include "hargan/models/factory.hpp"
#include "hargan/models/rgan.hpp"
#include "hargan/models/tgan.hpp"
#include "hargan/train/classifier_trainer.hpp"
#include "hargan/train/gan_trainer.hpp"
#include "model_fixtures.hpp"
#include "oracles.hpp"
#include "test_helpers.hpp"

using namespace hargan;
using namespace hargan::train;
using hargan::testing::seeded;

namespace {

// Always predicts `choice`.
class FixedClassifier : public models::Classifier {
 public:
  FixedClassifier(data::DatasetProfile p, std::size_t choice) : profile_(std::move(p)), choice_(choice) {}
  models::Architecture architecture() const override { return models::Architecture::TransformerClassifier; }
  nlohmann::json config() const override { return nlohmann::json::object(); }
  const data::DatasetProfile& profile() const override { return profile_; }
  Tensor forward(const Tensor& x, const nn::ForwardContext& = {}) const override {
    const std::size_t B = x.size(0), N = num_classes();
    Tensor out = Tensor::zeros({B, N});
    for (std::size_t b = 0; b < B; ++b) out.mutable_data()[b * N + choice_] = 1.0;
    return out;
  }

 private:
  data::DatasetProfile profile_;
  std::size_t choice_;
};

// Class 1 when the window mean is positive, class 0 otherwise.
class MeanSignClassifier : public models::Classifier {
 public:
  explicit MeanSignClassifier(data::DatasetProfile p) : profile_(std::move(p)) {}
  models::Architecture architecture() const override { return models::Architecture::TransformerClassifier; }
  nlohmann::json config() const override { return nlohmann::json::object(); }
  const data::DatasetProfile& profile() const override { return profile_; }
  Tensor forward(const Tensor& x, const nn::ForwardContext& = {}) const override {
    const Tensor m = mean(mean(x, 2), 1);
    const std::size_t B = x.size(0), N = num_classes();
    Tensor out = Tensor::zeros({B, N});
    for (std::size_t b = 0; b < B; ++b) out.mutable_data()[b * N + 1] = m[b];
    return out;
  }

 private:
  data::DatasetProfile profile_;
};

// Replays windows of a dataset, picked by the first noise coordinate.
class ReplayGenerator : public models::Generator {
 public:
  explicit ReplayGenerator(const data::WindowedDataset& ds) : ds_(ds) {}
  models::Architecture architecture() const override { return models::Architecture::RganGenerator; }
  nlohmann::json config() const override { return nlohmann::json::object(); }
  const data::DatasetProfile& profile() const override { return ds_.profile; }
  std::size_t noise_length() const override { return 1; }
  Tensor forward(const Tensor& z, const nn::ForwardContext& = {}) const override {
    std::vector<std::size_t> idx(z.size(0));
    for (std::size_t b = 0; b < idx.size(); ++b) idx[b] = pick(z[b]);
    return ds_.batch(idx);
  }
  std::size_t pick(double z) const { return static_cast<std::size_t>(std::floor(std::abs(z) * 1e6)) % ds_.size(); }

 private:
  const data::WindowedDataset& ds_;
};

// Emits a constant window; its one parameter only carries a zero gradient.
class ConstantGenerator : public models::Generator {
 public:
  ConstantGenerator(data::DatasetProfile p, double value) : profile_(std::move(p)), value_(value) {
    w_ = params_.add("w", Tensor::ones({1}));
  }
  models::Architecture architecture() const override { return models::Architecture::RganGenerator; }
  nlohmann::json config() const override { return nlohmann::json::object(); }
  const data::DatasetProfile& profile() const override { return profile_; }
  std::size_t noise_length() const override { return 1; }
  Tensor forward(const Tensor& z, const nn::ForwardContext& = {}) const override {
    const Tensor base = Tensor::full({z.size(0), profile_.channels, profile_.length}, value_);
    return base + reshape(w_ * 0.0, {1, 1, 1});
  }

 private:
  data::DatasetProfile profile_;
  double value_;
  Tensor w_;
};

// Logit 40 * window mean: saturates on windows of +1 and -1.
class SaturatedDiscriminator : public models::Discriminator {
 public:
  explicit SaturatedDiscriminator(data::DatasetProfile p) : profile_(std::move(p)) {
    w_ = params_.add("w", Tensor::ones({1}));
  }
  models::Architecture architecture() const override { return models::Architecture::RganDiscriminator; }
  nlohmann::json config() const override { return nlohmann::json::object(); }
  const data::DatasetProfile& profile() const override { return profile_; }
  Tensor forward(const Tensor& x, const nn::ForwardContext& = {}) const override {
    return mean(mean(x, 2), 1) * 40.0 + w_ * 0.0;
  }

 private:
  data::DatasetProfile profile_;
  Tensor w_;
};

data::WindowedDataset class_bucket(const data::DatasetProfile& p, int label, std::size_t n, std::uint64_t seed,
                                   double fill = std::numeric_limits<double>::quiet_NaN()) {
  data::WindowedDataset ds{p, {}};
  for (std::size_t i = 0; i < n; ++i) {
    Tensor x = std::isnan(fill) ? seeded({p.channels, p.length}, seed + i) : Tensor::full({p.channels, p.length}, fill);
    ds.windows.push_back({x, label, static_cast<int>(1 + i % 2)});
  }
  return ds;
}

GanTrainConfig quick_gan(std::size_t epochs, std::size_t interval) {
  GanTrainConfig c;
  c.max_epochs = epochs;
  c.batch_size = 4;
  c.gate_interval = interval;
  c.gate_samples = 16;
  c.seed = 11;
  return c;
}

GanTrainResult run_tiny_tgan(const models::Classifier& clf, const data::WindowedDataset& bucket,
                             const GanTrainConfig& cfg) {
  Rng rng(3);
  models::TganGenerator g(fixtures::tiny_tgan(), rng);
  models::TganDiscriminator d(fixtures::tiny_tgan(), rng);
  return train_gan(g, d, bucket, clf, cfg);
}

}  // namespace

TEST_CASE("adam first step moves by lr * g / (|g| + eps)") {
  AdamConfig cfg{0.01, 0.9, 0.999, 1e-8};
  nn::ParameterSet ps;
  Tensor p = ps.add("p", Tensor({4}, {1.0, -2.0, 0.5, 3.0}));
  const std::vector<double> g{0.3, -4.0, 1e-3, 2.5};
  Adam opt(ps, cfg);
  sum(p * Tensor({4}, g)).backward();
  opt.step();
  const std::vector<double> start{1.0, -2.0, 0.5, 3.0};
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(p[i] == doctest::Approx(start[i] - cfg.learning_rate * g[i] / (std::abs(g[i]) + cfg.epsilon)).epsilon(1e-12));
  }
  CHECK(opt.steps() == 1);
  CHECK_FALSE(p.has_grad());
}

TEST_CASE("adam leaves parameters alone under a zero or absent gradient") {
  nn::ParameterSet ps;
  Tensor a = ps.add("a", Tensor({2}, {1.5, -0.5}));
  Tensor b = ps.add("b", Tensor({1}, {7.0}));
  Adam opt(ps, AdamConfig::gan_defaults());
  for (int i = 0; i < 3; ++i) {
    sum(a * 0.0).backward();
    opt.step();
  }
  CHECK(testing::values(a) == std::vector<double>{1.5, -0.5});
  CHECK(testing::values(b) == std::vector<double>{7.0});
  for (const auto& m : opt.first_moments()) {
    for (double v : m) CHECK(v == 0.0);
  }
}

TEST_CASE("adam converges on a quadratic bowl within 100 steps") {
  nn::ParameterSet ps;
  Tensor p = ps.add("p", Tensor({3}, {2.0, -1.0, 0.5}));
  const Tensor centre({3}, {0.3, 0.7, -0.4});
  const Tensor weight({3}, {1.0, 3.0, 0.5});
  Adam opt(ps, {0.1, 0.5, 0.999, 1e-8});
  for (int i = 0; i < 100; ++i) {
    const Tensor d = p - centre;
    sum(weight * d * d).backward();
    opt.step();
  }
  for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(p[i] - centre[i]) <= 1e-3);
}

TEST_CASE("adam rejects a non-finite gradient before updating") {
  nn::ParameterSet ps;
  Tensor a = ps.add("a", Tensor({2}, {1.0, 2.0}));
  Tensor b = ps.add("b", Tensor({1}, {3.0}));
  Adam opt(ps, AdamConfig::classifier_defaults());
  sum(a * Tensor({2}, {1.0, 1.0}) + b * std::numeric_limits<double>::quiet_NaN()).backward();
  CHECK_THROWS_AS(opt.step(), NumericalError);
  CHECK(testing::values(a) == std::vector<double>{1.0, 2.0});
  CHECK(testing::values(b) == std::vector<double>{3.0});
  CHECK(opt.steps() == 0);
}

TEST_CASE("adam config validation") {
  CHECK_THROWS(AdamConfig{0.0, 0.9, 0.999, 1e-8}.validate());
  CHECK_THROWS(AdamConfig{1e-3, 1.0, 0.999, 1e-8}.validate());
  CHECK_THROWS(AdamConfig{1e-3, 0.9, 0.999, 0.0}.validate());
  CHECK_NOTHROW(AdamConfig::gan_defaults().validate());
}

TEST_CASE("transformer classifier separates the toy corpus under LOSO") {
  const auto profile = data::DatasetProfile::toy();
  const auto ds = data::make_windows(data::make_toy_streams({}), profile, 25);
  auto [train_split, val_split] = data::loso_split(ds, 3);
  const auto stats = data::fit_normalize(train_split);
  Rng rng(1);
  auto clf = models::build_classifier(models::ClassifierConfig::defaults(models::ClassifierKind::Transformer, profile), rng);
  ClassifierTrainConfig cfg;
  cfg.epochs = 50;
  cfg.batch_size = 16;
  const auto result = train_classifier(*clf, data::apply_normalize(train_split, stats),
                                       data::apply_normalize(val_split, stats), cfg);
  CHECK(result.report.macro_f1 >= 0.99);
  CHECK(result.log.size() == 50);
  CHECK(result.report.total() == val_split.size());
  // The returned report describes the parameters the model now holds.
  CHECK(evaluate_classifier(*clf, data::apply_normalize(val_split, stats)).macro_f1 == result.report.macro_f1);
}

TEST_CASE("zero-epoch classifier budget keeps the initial parameters") {
  const auto profile = fixtures::tiny_profile();
  Rng rng(2);
  auto clf = models::build_classifier(fixtures::tiny_classifier(models::ClassifierKind::ConvLstm), rng);
  const auto before = models::snapshot(clf->params());
  data::WindowedDataset ds = class_bucket(profile, 1, 4, 5);
  ClassifierTrainConfig cfg;
  cfg.epochs = 0;
  const auto result = train_classifier(*clf, ds, ds, cfg);
  CHECK(result.log.empty());
  CHECK(result.best_epoch == 0);
  CHECK(models::snapshot(clf->params()) == before);
}

TEST_CASE("classifier training rejects empty splits") {
  const auto profile = fixtures::tiny_profile();
  Rng rng(2);
  auto clf = models::build_classifier(fixtures::tiny_classifier(models::ClassifierKind::ConvLstm), rng);
  const data::WindowedDataset full = class_bucket(profile, 1, 4, 5);
  const data::WindowedDataset empty{profile, {}};
  CHECK_THROWS_AS(train_classifier(*clf, empty, full, {}), DataError);
  CHECK_THROWS_AS(train_classifier(*clf, full, empty, {}), DataError);
}

TEST_CASE("discriminator and generator steps leave each other's parameters alone") {
  const auto profile = fixtures::tiny_profile();
  Rng rng(4);
  models::RganGenerator g(fixtures::tiny_rgan(), rng);
  models::RganDiscriminator d(fixtures::tiny_rgan(), rng);
  Adam g_opt(g.params(), AdamConfig::gan_defaults());
  Adam d_opt(d.params(), AdamConfig::gan_defaults());
  const auto bucket = class_bucket(profile, 2, 4, 30);
  nn::ForwardContext ctx{nn::Mode::Train, &rng};

  const auto g0 = models::snapshot(g.params());
  const auto d0 = models::snapshot(d.params());
  discriminator_step(g, d, d_opt, bucket.all(), rng, ctx);
  CHECK(models::snapshot(g.params()) == g0);
  for (const auto& [name, t] : g.params().entries()) CHECK_FALSE(t.has_grad());
  const auto d1 = models::snapshot(d.params());
  CHECK(d1 != d0);

  generator_step(g, d, g_opt, 4, rng, ctx);
  CHECK(models::snapshot(d.params()) == d1);
  for (const auto& [name, t] : d.params().entries()) CHECK_FALSE(t.has_grad());
  CHECK(models::snapshot(g.params()) != g0);
}

TEST_CASE("fixed-seed GAN training reproduces its log") {
  const auto profile = fixtures::tiny_profile();
  Rng rng(8);
  auto clf = models::build_classifier(fixtures::tiny_classifier(models::ClassifierKind::Transformer), rng);
  const auto bucket = class_bucket(profile, 3, 10, 40);
  const auto cfg = quick_gan(12, 4);
  const auto a = run_tiny_tgan(*clf, bucket, cfg);
  const auto b = run_tiny_tgan(*clf, bucket, cfg);
  REQUIRE(a.log.size() == 12);
  CHECK(a.log.to_csv(false) == b.log.to_csv(false));
  CHECK(a.log.entries[3].gate_f1.has_value());
  CHECK_FALSE(a.log.entries[4].gate_f1.has_value());
}

TEST_CASE("GAN training stops at the first gate meeting the threshold") {
  const auto profile = fixtures::tiny_profile();
  const auto bucket = class_bucket(profile, 2, 6, 50);
  const FixedClassifier always(profile, *profile.class_index(2));
  const auto result = run_tiny_tgan(always, bucket, quick_gan(40, 5));
  CHECK(result.converged);
  CHECK(result.converged_epoch == std::optional<std::size_t>(5));
  CHECK(result.log.size() == 5);
  CHECK(result.best_gate_f1 == std::optional<double>(1.0));

  const FixedClassifier never(profile, *profile.class_index(1));
  const auto miss = run_tiny_tgan(never, bucket, quick_gan(20, 5));
  CHECK_FALSE(miss.converged);
  CHECK_FALSE(miss.converged_epoch.has_value());
  CHECK(miss.log.size() == 20);
  CHECK(miss.best_gate_f1 == std::optional<double>(0.0));
}

TEST_CASE("converged flag matches the gate record and timings add up") {
  const auto profile = fixtures::tiny_profile();
  const auto bucket = class_bucket(profile, 2, 6, 50);
  const MeanSignClassifier clf(profile);
  for (std::uint64_t seed : {1, 2, 3}) {
    auto cfg = quick_gan(30, 3);
    cfg.gate_threshold = 0.6;
    cfg.seed = seed;
    const auto result = run_tiny_tgan(clf, bucket, cfg);
    bool any = false;
    for (std::size_t i = 0; i < result.log.size(); ++i) {
      const auto& e = result.log.entries[i];
      CHECK(e.epoch == i + 1);
      CHECK(e.seconds >= 0.0);
      if (e.gate_f1 && *e.gate_f1 >= cfg.gate_threshold) {
        any = true;
        CHECK(i + 1 == result.log.size());
      }
    }
    CHECK(result.converged == any);
    CHECK(result.log.total_seconds() <= result.total_seconds + 1e-6);
  }
}

TEST_CASE("collapse detector flags a saturated discriminator") {
  const auto profile = fixtures::tiny_profile();
  const auto bucket = class_bucket(profile, 1, 8, 0, 1.0);
  const FixedClassifier clf(profile, 1);
  auto cfg = quick_gan(60, 1000);
  cfg.collapse_window = 5;
  {
    ConstantGenerator g(profile, -1.0);
    SaturatedDiscriminator d(profile);
    const auto result = train_gan(g, d, bucket, clf, cfg);
    CHECK(result.collapsed);
    CHECK(result.log.size() == 5);
    for (const auto& e : result.log.entries) CHECK(e.d_loss < cfg.collapse_epsilon);
  }
  {
    cfg.stop_on_collapse = false;
    ConstantGenerator g(profile, -1.0);
    SaturatedDiscriminator d(profile);
    const auto result = train_gan(g, d, bucket, clf, cfg);
    CHECK(result.collapsed);
    CHECK(result.log.size() == 60);
  }
  {
    // A generator that matches the data keeps the discriminator loss high.
    ConstantGenerator g(profile, 1.0);
    SaturatedDiscriminator d(profile);
    const auto result = train_gan(g, d, bucket, clf, cfg);
    CHECK_FALSE(result.collapsed);
  }
}

TEST_CASE("collapse detector needs an unbroken run") {
  CollapseDetector c(3, 0.1);
  CHECK_FALSE(c.update(0.05));
  CHECK_FALSE(c.update(0.05));
  CHECK_FALSE(c.update(0.5));
  CHECK_FALSE(c.update(0.05));
  CHECK_FALSE(c.update(0.05));
  CHECK(c.update(0.05));
  CHECK(c.update(2.0));
  CHECK(c.collapsed());
}

TEST_CASE("GAN training input checks") {
  const auto profile = fixtures::tiny_profile();
  const FixedClassifier clf(profile, 0);
  CHECK_THROWS_AS(run_tiny_tgan(clf, data::WindowedDataset{profile, {}}, quick_gan(3, 1)), DataError);
  auto mixed = class_bucket(profile, 1, 3, 1);
  mixed.windows[1].label = 2;
  CHECK_THROWS_AS(run_tiny_tgan(clf, mixed, quick_gan(3, 1)), DataError);
  CHECK_THROWS_AS(run_tiny_tgan(clf, class_bucket(profile, 9, 3, 1), quick_gan(3, 1)), DataError);
  auto bad = quick_gan(3, 1);
  bad.gate_threshold = 0.0;
  CHECK_THROWS(bad.validate());
  bad.gate_threshold = 1.01;
  CHECK_THROWS(bad.validate());
  bad.gate_threshold = 1.0;
  bad.batch_size = 0;
  CHECK_THROWS(bad.validate());
}

TEST_CASE("gate is zero for a classifier that never predicts the class") {
  const auto profile = fixtures::tiny_profile();
  Rng rng(6);
  models::TganGenerator g(fixtures::tiny_tgan(), rng);
  const FixedClassifier never(profile, 0);
  Rng gate(1);
  CHECK(validation_gate(g, never, 2, 32, gate) == 0.0);
}

TEST_CASE("replayed real windows score 2r / (1 + r) for classifier recall r") {
  const auto profile = fixtures::tiny_profile();
  const auto bucket = class_bucket(profile, 2, 40, 100);
  const ReplayGenerator replay(bucket);
  const MeanSignClassifier clf(profile);
  const std::size_t n = 64;
  Rng a(12), b(12);
  const double f1 = validation_gate(replay, clf, 1, n, a);
  const auto pred = clf.predict(replay.sample(n, b));
  const double recall = static_cast<double>(std::count(pred.begin(), pred.end(), 1)) / n;
  REQUIRE(recall > 0.0);
  REQUIRE(recall < 1.0);
  CHECK(f1 == doctest::Approx(2 * recall / (1 + recall)).epsilon(1e-12));
}

TEST_CASE("gate F1 matches an independent recount") {
  const auto profile = fixtures::tiny_profile();
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Rng rng(20 + seed);
    models::TganGenerator g(fixtures::tiny_tgan(), rng);
    auto clf = models::build_classifier(fixtures::tiny_classifier(models::ClassifierKind::Transformer), rng);
    for (std::size_t cls = 0; cls < 3; ++cls) {
      Rng a(seed), b(seed);
      const double f1 = validation_gate(g, *clf, cls, 50, a);
      const auto pred = clf->predict(g.sample(50, b));
      const auto c = oracle::recount(pred, std::vector<std::size_t>(50, cls), cls);
      const double expected = c.tp == 0 ? 0.0 : 2.0 * c.tp / (2.0 * c.tp + c.fp + c.fn);
      CHECK(f1 == expected);
    }
  }
}

TEST_CASE("train log CSV round trip") {
  TrainLog log;
  log.entries = {{1, 1.25, 0.5, 0.01, std::nullopt},
                 {2, 0.1 + 0.2, 1e-300, 0.0, 0.953125},
                 {3, 1.0 / 3.0, 2.0 / 3.0, 1.5, std::nullopt}};
  const std::string csv = log.to_csv();
  CHECK(csv.rfind("epoch,d_loss,g_loss,seconds,gate_f1\n", 0) == 0);
  const TrainLog back = TrainLog::from_csv(csv);
  REQUIRE(back.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(back.entries[i].epoch == log.entries[i].epoch);
    CHECK(back.entries[i].d_loss == log.entries[i].d_loss);
    CHECK(back.entries[i].g_loss == log.entries[i].g_loss);
    CHECK(back.entries[i].seconds == log.entries[i].seconds);
    CHECK(back.entries[i].gate_f1 == log.entries[i].gate_f1);
  }
  CHECK(back.to_csv() == csv);
  CHECK(log.best_gate_f1() == std::optional<double>(0.953125));
  CHECK(log.total_seconds() == doctest::Approx(1.51));
  const std::string masked = log.to_csv(false);
  CHECK(masked.find("0.01") == std::string::npos);
  CHECK_THROWS_AS(TrainLog::from_csv("epoch,d_loss\n1,2\n"), DataError);
}
