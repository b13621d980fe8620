#include <cmath>
#include <cstring>

#include "doctest.h"
#include "hargan/core/errors.hpp"
#include "hargan/core/io.hpp"
#include "hargan/core/ops.hpp"
#include "hargan/models/checkpoint.hpp"
#include "hargan/models/classifiers.hpp"
#include "hargan/models/factory.hpp"
#include "hargan/models/rgan.hpp"
#include "hargan/models/tgan.hpp"
#include "hargan/nn/losses.hpp"
#include "model_fixtures.hpp"
#include "test_helpers.hpp"

using namespace hargan;
using namespace hargan::models;
using hargan::testing::checked_grad_error;
using hargan::testing::probe;
using hargan::testing::seeded;

namespace {

const auto kPamap = data::DatasetProfile::pamap2({1, 2, 3, 4, 12, 13, 17});
const auto kRwhar = data::DatasetProfile::rwhar();

double max_abs_diff(const Tensor& a, const Tensor& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.numel(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// Train mode with the same dropout masks on every call.
template <typename F>
Tensor with_fixed_dropout(F f) {
  Rng rng(17);
  nn::ForwardContext ctx{nn::Mode::Train, &rng};
  return f(ctx);
}

void check_generator_grad(const Generator& g, std::uint64_t seed) {
  const Tensor z = seeded({2, g.noise_length()}, seed);
  auto f = [&] { return with_fixed_dropout([&](const nn::ForwardContext& ctx) { return probe(g.forward(z, ctx)); }); };
  CHECK(checked_grad_error(f, g.params().tensors()) <= 1e-4);
}

void check_discriminator_grad(const Discriminator& d, std::uint64_t seed) {
  const auto& p = d.profile();
  const Tensor x = seeded({2, p.channels, p.length}, seed);
  const Tensor targets({2}, {1.0, 0.0});
  auto f = [&] {
    return with_fixed_dropout([&](const nn::ForwardContext& ctx) { return nn::bce_with_logits(d.forward(x, ctx), targets); });
  };
  CHECK(checked_grad_error(f, d.params().tensors()) <= 1e-4);
}

void check_classifier_grad(const Classifier& c, std::uint64_t seed) {
  const auto& p = c.profile();
  const Tensor x = seeded({2, p.channels, p.length}, seed);
  const std::vector<std::size_t> labels{0, 2};
  auto f = [&] {
    return with_fixed_dropout([&](const nn::ForwardContext& ctx) { return nn::cross_entropy(c.forward(x, ctx), labels); });
  };
  CHECK(checked_grad_error(f, c.params().tensors()) <= 1e-4);
}

}  // namespace

TEST_CASE("generator output shapes per profile") {
  for (const auto& profile : {kPamap, kRwhar}) {
    Rng rng(1);
    RganGenerator rg(RganConfig::defaults(profile), rng);
    TganGenerator tg(TganConfig::defaults(profile), rng);
    for (const Generator* g : {static_cast<const Generator*>(&rg), static_cast<const Generator*>(&tg)}) {
      CHECK(g->forward(seeded({g->noise_length()}, 3)).shape() == Shape{profile.channels, profile.length});
      CHECK(g->sample(3, rng).shape() == Shape{3, profile.channels, profile.length});
    }
  }
  Rng rng(1);
  CHECK(RganGenerator(RganConfig::defaults(kPamap), rng).forward(seeded({32}, 1)).shape() == Shape{27, 100});
  CHECK(TganGenerator(TganConfig::defaults(kRwhar), rng).forward(seeded({32}, 1)).shape() == Shape{6, 50});
}

TEST_CASE("discriminators and classifiers accept exactly the profile shape") {
  for (const auto& profile : {kPamap, kRwhar}) {
    Rng rng(2);
    RganDiscriminator rd(RganConfig::defaults(profile), rng);
    TganDiscriminator td(TganConfig::defaults(profile), rng);
    const Tensor one = seeded({profile.channels, profile.length}, 4);
    const Tensor many = seeded({3, profile.channels, profile.length}, 5);
    for (const Discriminator* d : {static_cast<const Discriminator*>(&rd), static_cast<const Discriminator*>(&td)}) {
      CHECK(d->forward(one).dim() == 0);
      CHECK(d->forward(many).shape() == Shape{3});
      CHECK_THROWS_AS(d->forward(seeded({profile.channels + 1, profile.length}, 1)), ShapeError);
      CHECK_THROWS_AS(d->forward(seeded({profile.channels, profile.length - 1}, 1)), ShapeError);
    }
    for (auto kind : {ClassifierKind::ConvLstm, ClassifierKind::Transformer}) {
      auto c = build_classifier(ClassifierConfig::defaults(kind, profile), rng);
      CHECK(c->forward(one).shape() == Shape{profile.num_classes()});
      CHECK(c->forward(many).shape() == Shape{3, profile.num_classes()});
      CHECK_THROWS_AS(c->forward(seeded({profile.length, profile.channels}, 1)), ShapeError);
    }
  }
  Rng rng(2);
  CHECK(build_classifier(ClassifierConfig::defaults(ClassifierKind::Transformer, kPamap), rng)->num_classes() == 7);
  CHECK(build_classifier(ClassifierConfig::defaults(ClassifierKind::ConvLstm, kRwhar), rng)->num_classes() == 8);
}

TEST_CASE("generators are non-degenerate and eval forwards deterministic") {
  const auto profile = kRwhar;
  for (auto family : {GanFamily::Rgan, GanFamily::Tgan}) {
    nlohmann::json cfg = family == GanFamily::Rgan ? nlohmann::json(RganConfig::defaults(profile))
                                                   : nlohmann::json(TganConfig::defaults(profile));
    Rng rng(3);
    auto g = build_generator(family, cfg, rng);
    auto d = build_discriminator(family, cfg, rng);
    Rng a(10), b(11);
    CHECK(max_abs_diff(g->sample(1, a), g->sample(1, b)) > 0.0);
    const Tensor x = seeded({profile.channels, profile.length}, 6);
    CHECK(d->forward(x).item() == d->forward(x).item());
    const Tensor z = seeded({g->noise_length()}, 7);
    CHECK(max_abs_diff(g->forward(z), g->forward(z)) == 0.0);
  }
}

TEST_CASE("gradient check: rgan") {
  Rng rng(21);
  RganGenerator g(fixtures::tiny_rgan(), rng);
  RganDiscriminator d(fixtures::tiny_rgan(), rng);
  check_generator_grad(g, 1);
  check_discriminator_grad(d, 2);
}

TEST_CASE("gradient check: tgan") {
  Rng rng(20);
  TganGenerator g(fixtures::tiny_tgan(), rng);
  TganDiscriminator d(fixtures::tiny_tgan(), rng);
  check_generator_grad(g, 3);
  check_discriminator_grad(d, 4);
}

TEST_CASE("gradient check: classifiers") {
  Rng conv_rng(24), trans_rng(20);
  ConvLstmClassifier conv(fixtures::tiny_classifier(ClassifierKind::ConvLstm), conv_rng);
  TransformerClassifier trans(fixtures::tiny_classifier(ClassifierKind::Transformer), trans_rng);
  check_classifier_grad(conv, 5);
  check_classifier_grad(trans, 6);
}

TEST_CASE("tgan with no encoder layers is a projection of input plus position") {
  auto cfg = fixtures::tiny_tgan();
  cfg.gen_layers = 0;
  Rng rng(8);
  TganGenerator g(cfg, rng);
  const Tensor z = seeded({cfg.noise_len}, 9);
  const Tensor out = g.forward(z);

  const auto& P = g.params();
  const std::size_t C = 2, L = 6, d = cfg.model_dim, Z = cfg.noise_len;
  const auto ws = P.get("seed.weight").data(), bs = P.get("seed.bias").data();
  const auto wp = P.get("projection.weight").data(), bp = P.get("projection.bias").data();
  const auto wh = P.get("head.weight").data(), bh = P.get("head.bias").data();
  const Tensor pe = nn::positional_encoding(L, d);
  std::vector<double> seed(C * L);
  for (std::size_t o = 0; o < C * L; ++o) {
    seed[o] = bs[o];
    for (std::size_t i = 0; i < Z; ++i) seed[o] += z[i] * ws[i * C * L + o];
  }
  for (std::size_t t = 0; t < L; ++t) {
    std::vector<double> h(d);
    for (std::size_t j = 0; j < d; ++j) {
      h[j] = bp[j] + pe[t * d + j];
      for (std::size_t c = 0; c < C; ++c) h[j] += wp[j * C + c] * seed[c * L + t];
    }
    for (std::size_t c = 0; c < C; ++c) {
      double y = bh[c];
      for (std::size_t j = 0; j < d; ++j) y += wh[c * d + j] * h[j];
      CHECK(std::abs(out[c * L + t] - y) <= 1e-12);
    }
  }
}

TEST_CASE("count_params") {
  nn::ParameterSet ps;
  Rng rng(1);
  nn::Linear lin(ps, "lin", 3, 2, rng);
  CHECK(count_params(ps) == 8);
  nn::ParameterSet cs;
  nn::Conv1d conv(cs, "conv", 2, 4, 3, 1, rng);
  CHECK(count_params(cs) == 28);

  for (const auto& profile : {fixtures::tiny_profile(), kPamap, kRwhar}) {
    auto rc = RganConfig::defaults(profile);
    auto tc = TganConfig::defaults(profile);
    tc.gen_layers = 2;
    CHECK(count_params(RganGenerator(rc, rng)) == fixtures::count::rgan_generator(rc));
    CHECK(count_params(RganDiscriminator(rc, rng)) == fixtures::count::rgan_discriminator(rc));
    CHECK(count_params(TganGenerator(tc, rng)) == fixtures::count::tgan_generator(tc));
    CHECK(count_params(TganDiscriminator(tc, rng)) == fixtures::count::tgan_discriminator(tc));
    for (auto kind : {ClassifierKind::ConvLstm, ClassifierKind::Transformer}) {
      auto cc = ClassifierConfig::defaults(kind, profile);
      CHECK(count_params(*build_classifier(cc, rng)) == fixtures::count::classifier(cc));
    }
  }
  CHECK(count_params(RganGenerator(fixtures::tiny_rgan(), rng)) == fixtures::count::rgan_generator(fixtures::tiny_rgan()));
}

TEST_CASE("argmax is invariant under a constant logit shift") {
  Rng rng(4);
  auto c = build_classifier(fixtures::tiny_classifier(ClassifierKind::Transformer), rng);
  const Tensor x = seeded({5, 2, 6}, 12);
  const Tensor logits = c->forward(x);
  const auto pred = c->predict(x);
  const Tensor shifted = add_scalar(logits, 37.5);
  for (std::size_t b = 0; b < 5; ++b) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < 3; ++k) {
      if (shifted[b * 3 + k] > shifted[b * 3 + best]) best = k;
    }
    CHECK(best == pred[b]);
  }
  CHECK(c->predict(x, 2) == pred);
}

TEST_CASE("configuration validation and json round trip") {
  auto t = fixtures::tiny_tgan();
  t.disc_heads = 3;
  CHECK_THROWS_AS(t.validate(), DataError);
  auto r = fixtures::tiny_rgan();
  r.gen_schedule = {3, 4};
  CHECK_THROWS_AS(r.validate(), DataError);
  r = fixtures::tiny_rgan();
  r.noise_len = 0;
  CHECK_THROWS_AS(r.validate(), DataError);

  const nlohmann::json j = fixtures::tiny_rgan();
  const auto back = j.get<RganConfig>();
  CHECK(nlohmann::json(back) == j);
  nlohmann::json partial = {{"profile", kRwhar.to_json()}, {"model_dim", 12}, {"gen_heads", 3}};
  const auto tc = partial.get<TganConfig>();
  CHECK(tc.model_dim == 12);
  CHECK(tc.disc_heads == 2);
  CHECK_THROWS_AS((nlohmann::json{{"model_dim", 4}}.get<TganConfig>()), DataError);
  CHECK_THROWS_AS((nlohmann::json{{"profile", kRwhar.to_json()}, {"model_dim", "x"}}.get<TganConfig>()), DataError);
  CHECK(doubling_schedule(6, 24) == std::vector<std::size_t>{6, 12, 24});
  CHECK(doubling_schedule(27, 100) == std::vector<std::size_t>{27, 54, 100});
  CHECK(doubling_schedule(4, 4) == std::vector<std::size_t>{4});
}

TEST_CASE("checkpoint round trip is bit exact for every architecture") {
  auto dir = hargan::testing::scratch_dir("ckpt");
  Rng rng(31);
  std::vector<std::unique_ptr<Model>> all;
  all.push_back(std::make_unique<RganGenerator>(fixtures::tiny_rgan(), rng));
  all.push_back(std::make_unique<RganDiscriminator>(fixtures::tiny_rgan(), rng));
  all.push_back(std::make_unique<TganGenerator>(fixtures::tiny_tgan(), rng));
  all.push_back(std::make_unique<TganDiscriminator>(fixtures::tiny_tgan(), rng));
  all.push_back(build_classifier(fixtures::tiny_classifier(ClassifierKind::ConvLstm), rng));
  all.push_back(build_classifier(fixtures::tiny_classifier(ClassifierKind::Transformer), rng));
  for (const auto& m : all) {
    const auto path = dir / (to_string(m->architecture()) + ".ckpt");
    save_checkpoint(*m, path, {{"class_id", 4}});
    auto loaded = load_checkpoint(path);
    CHECK(loaded.model->architecture() == m->architecture());
    CHECK(loaded.metadata.at("class_id") == 4);
    CHECK(count_params(*loaded.model) == count_params(*m));
    CHECK(loaded.model->config() == m->config());
    const auto& a = m->params().entries();
    const auto& b = loaded.model->params().entries();
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].first == b[i].first);
      CHECK(std::memcmp(a[i].second.data().data(), b[i].second.data().data(), a[i].second.numel() * 8) == 0);
    }
    // Saving the loaded copy reproduces the file byte for byte.
    save_checkpoint(*loaded.model, dir / "again.ckpt", loaded.metadata);
    CHECK(io::read_file(path) == io::read_file(dir / "again.ckpt"));
  }

  const auto gpath = dir / (to_string(Architecture::TganGenerator) + ".ckpt");
  CHECK(load_generator(gpath)->noise_length() == 3);
  CHECK_THROWS_AS(load_classifier(gpath), DataError);

  std::string text = io::read_file(gpath);
  const auto pos = text.find("\"format_version\":1");
  REQUIRE(pos != std::string::npos);
  text.replace(pos, 18, "\"format_version\":2");
  io::write_file_atomic(dir / "v2.ckpt", text);
  CHECK_THROWS_AS(load_checkpoint(dir / "v2.ckpt"), DataError);

  text = io::read_file(gpath);
  io::write_file_atomic(dir / "short.ckpt", text.substr(0, text.size() - 8));
  CHECK_THROWS_AS(load_checkpoint(dir / "short.ckpt"), DataError);
  io::write_file_atomic(dir / "long.ckpt", text + "12345678");
  CHECK_THROWS_AS(load_checkpoint(dir / "long.ckpt"), DataError);
  CHECK_THROWS_AS(load_checkpoint(dir / "missing.ckpt"), DataError);
}
