#include "hargan/cli/commands.hpp"

#include <atomic>
#include <exception>
#include <map>
#include <ostream>
#include <thread>
#include <tuple>

#include "hargan/core/errors.hpp"
#include "hargan/core/io.hpp"
#include "hargan/data/dataset_io.hpp"
#include "hargan/data/readers.hpp"
#include "hargan/data/toy_corpus.hpp"
#include "hargan/eval/correlation.hpp"
#include "hargan/eval/reports.hpp"
#include "hargan/models/checkpoint.hpp"

namespace hargan::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json stats_to_json(const data::NormStats& s) { return {{"mean", s.mean}, {"stddev", s.stddev}}; }

std::optional<data::NormStats> stats_from_json(const json& j) {
  if (!j.is_object()) return std::nullopt;
  data::NormStats s;
  s.mean = j.at("mean").get<std::vector<double>>();
  s.stddev = j.at("stddev").get<std::vector<double>>();
  return s;
}

std::vector<std::string> class_names(const data::DatasetProfile& p) {
  std::vector<std::string> out;
  for (int id : p.activity_ids) out.push_back(std::to_string(id));
  return out;
}

void require_same_profile(const data::DatasetProfile& a, const data::DatasetProfile& b, const std::string& what) {
  if (a.to_json() != b.to_json()) {
    throw DataError("profile mismatch: " + what + " uses '" + a.name + "' (" + std::to_string(a.channels) + "x" +
                    std::to_string(a.length) + "), expected '" + b.name + "' (" + std::to_string(b.channels) + "x" +
                    std::to_string(b.length) + ")");
  }
}

void require_exists(const fs::path& p, const std::string& what) {
  if (p.empty()) throw UsageError("no " + what + " given");
  if (!fs::exists(p)) throw DataError(what + " " + p.string() + " does not exist");
}

void write_run_config(const RunConfig& c, const fs::path& dir) {
  eval::write_json(to_json(c), dir / "run_config.json");
}

struct ClassRun {
  int activity = 0;
  std::uint64_t init_seed = 0;
  std::uint64_t train_seed = 0;
  train::GanTrainResult result;
  std::exception_ptr error;
};

}  // namespace

RunConfig resolve_run_config(const CommonOptions& common) {
  RunConfig c = common.config ? load_run_config(*common.config) : RunConfig{};
  if (common.seed) c.seed = *common.seed;
  if (common.out) c.out = *common.out;
  if (common.profile) c.profile = resolve_profile_arg(*common.profile);
  return c;
}

fs::path cmd_ingest(const IngestOptions& opts, std::ostream& log) {
  RunConfig c = resolve_run_config(opts.common);
  if (opts.format) c.ingest.format = *opts.format;
  if (opts.input) c.ingest.input = *opts.input;
  if (opts.stride) c.ingest.stride = *opts.stride;
  const auto& profile = c.require_profile();
  const fs::path out = c.require_out() / kWindowsDir;

  std::vector<data::RecordStream> streams;
  const std::string& format = c.ingest.format;
  if (format == "canonical-csv") {
    require_exists(c.ingest.input, "input file");
    streams = data::load_canonical_csv(c.ingest.input);
  } else if (format == "pamap2") {
    require_exists(c.ingest.input, "PAMAP2 directory");
    streams = data::load_pamap2(c.ingest.input, profile.activity_ids);
  } else if (format == "toy") {
    data::ToyCorpusConfig toy;
    toy.channels = profile.channels;
    toy.seed = c.require_seed();
    streams = data::make_toy_streams(toy);
  } else {
    throw UsageError("unknown input format '" + format + "' (expected canonical-csv, pamap2 or toy)");
  }

  const std::size_t stride = c.ingest.stride.value_or(data::default_stride(profile));
  const auto ds = data::make_windows(streams, profile, stride);
  const fs::path manifest = data::save_windowed(ds, out);
  write_run_config(c, out);
  log << "ingested " << streams.size() << " stream(s) into " << ds.size() << " window(s) of " << profile.channels
      << "x" << profile.length << ": " << manifest.string() << "\n";
  return manifest;
}

int cmd_train_classifier(const TrainClassifierOptions& opts, std::ostream& log) {
  RunConfig c = resolve_run_config(opts.common);
  if (opts.manifest) c.manifest = *opts.manifest;
  if (opts.validation_subject) c.validation_subject = *opts.validation_subject;
  const std::uint64_t seed = c.require_seed();
  const fs::path out = c.require_out() / kClassifierDir;
  if (c.manifest.empty()) c.manifest = c.out / kWindowsDir;
  require_exists(c.manifest, "manifest");

  const auto loaded = data::load_windowed(c.manifest);
  const auto& profile = loaded.dataset.profile;
  if (c.profile) require_same_profile(profile, *c.profile, "the manifest");
  if (loaded.stats) throw DataError("train-classifier expects raw windows; the manifest is already normalized");
  const auto subjects = loaded.dataset.subjects();
  if (subjects.size() < 2) throw DataError("leave-one-subject-out needs windows from at least two subjects");
  if (!c.validation_subject) c.validation_subject = subjects.back();

  auto [train_split, val_split] = data::loso_split(loaded.dataset, *c.validation_subject);
  const auto stats = data::fit_normalize(train_split);
  train_split = data::apply_normalize(train_split, stats);
  val_split = data::apply_normalize(val_split, stats);

  Rng master(seed);
  Rng init = master.fork();
  auto model = models::build_classifier(c.classifier_config(profile), init);
  train::ClassifierTrainConfig tc = c.classifier.training;
  tc.seed = master.next_u64();
  const auto result = train::train_classifier(*model, train_split, val_split, tc);

  fs::create_directories(out);
  const json metadata = {{"normalization", stats_to_json(stats)},
                         {"validation_subject", *c.validation_subject},
                         {"best_epoch", result.best_epoch},
                         {"val_macro_f1", result.report.macro_f1}};
  models::save_checkpoint(*model, out / "classifier.ckpt", metadata);
  io::write_file_atomic(out / "classifier_log.csv", train::classifier_log_csv(result.log));
  eval::write_evaluation(result.report, out, "validation", class_names(profile));
  write_run_config(c, out);
  log << "classifier " << models::to_string(model->architecture()) << ": validation macro-F1 "
      << result.report.macro_f1 << " (best epoch " << result.best_epoch << ", subject " << *c.validation_subject
      << " held out)\n";
  return kExitOk;
}

int cmd_train_gan(const TrainGanOptions& opts, std::ostream& log) {
  RunConfig c = resolve_run_config(opts.common);
  if (opts.manifest) c.manifest = *opts.manifest;
  if (opts.classifier) c.gan.classifier = *opts.classifier;
  if (opts.family) c.gan.family = models::gan_family_from_string(*opts.family);
  if (opts.max_epochs) c.gan.training.max_epochs = *opts.max_epochs;
  if (!opts.classes.empty()) c.gan.classes = opts.classes;
  const std::uint64_t seed = c.require_seed();
  const fs::path out = c.require_out() / models::to_string(c.gan.family);
  if (c.manifest.empty()) c.manifest = c.out / kWindowsDir;
  if (c.gan.classifier.empty()) c.gan.classifier = c.out / kClassifierDir / "classifier.ckpt";
  require_exists(c.manifest, "manifest");
  require_exists(c.gan.classifier, "classifier checkpoint");

  json clf_meta;
  const auto classifier = models::load_classifier(c.gan.classifier, &clf_meta);
  const auto loaded = data::load_windowed(c.manifest);
  const auto& profile = loaded.dataset.profile;
  require_same_profile(profile, classifier->profile(), "the manifest");
  if (c.profile) require_same_profile(profile, *c.profile, "the manifest");
  const auto stats = stats_from_json(clf_meta.value("normalization", json()));
  if (!stats) throw DataError("classifier checkpoint carries no normalization statistics");
  if (loaded.stats) throw DataError("train-gan expects raw windows; the manifest is already normalized");

  // GANs learn from the classifier's training subjects only.
  data::WindowedDataset pool = data::apply_normalize(loaded.dataset, *stats);
  if (clf_meta.contains("validation_subject")) {
    pool = data::loso_split(pool, clf_meta.at("validation_subject").get<int>()).first;
  }
  const auto buckets = data::partition_by_class(pool);
  std::vector<int> classes = c.gan.classes;
  if (classes.empty()) {
    for (const auto& [activity, bucket] : buckets) classes.push_back(activity);
  }
  if (classes.empty()) throw DataError("no training windows to learn from");

  // Seeds are drawn for every profile class in order, so a class trains the
  // same way whichever subset is selected.
  Rng master(seed);
  std::map<int, std::pair<std::uint64_t, std::uint64_t>> class_seeds;
  for (int activity : profile.activity_ids) {
    const std::uint64_t init_seed = master.next_u64();
    class_seeds[activity] = {init_seed, master.next_u64()};
  }
  std::vector<ClassRun> runs;
  for (int activity : classes) {
    if (!buckets.count(activity)) throw DataError("no training windows of activity " + std::to_string(activity));
    ClassRun r;
    r.activity = activity;
    std::tie(r.init_seed, r.train_seed) = class_seeds.at(activity);
    runs.push_back(r);
  }
  const json model_cfg = c.gan_model_config(profile);

  auto train_one = [&](ClassRun& r) {
    try {
      Rng init(r.init_seed);
      auto g = models::build_generator(c.gan.family, model_cfg, init);
      auto d = models::build_discriminator(c.gan.family, model_cfg, init);
      train::GanTrainConfig tc = c.gan.training;
      tc.seed = r.train_seed;
      r.result = train::train_gan(*g, *d, buckets.at(r.activity), *classifier, tc);

      const fs::path dir = out / ("class_" + std::to_string(r.activity));
      fs::create_directories(dir);
      const json meta = {{"activity", r.activity},
                         {"family", models::to_string(c.gan.family)},
                         {"normalization", stats_to_json(*stats)},
                         {"converged", r.result.converged},
                         {"epochs", r.result.log.size()}};
      models::save_checkpoint(*g, dir / "generator.ckpt", meta);
      models::save_checkpoint(*d, dir / "discriminator.ckpt", meta);
      io::write_file_atomic(dir / "train_log.csv", r.result.log.to_csv());
    } catch (...) {
      r.error = std::current_exception();
    }
  };

  const std::size_t jobs = std::max<std::size_t>(1, std::min(opts.common.jobs, runs.size()));
  if (jobs == 1) {
    for (auto& r : runs) train_one(r);
  } else {
    std::vector<std::thread> pool_threads;
    std::atomic<std::size_t> next{0};
    for (std::size_t t = 0; t < jobs; ++t) {
      pool_threads.emplace_back([&] {
        for (std::size_t i = next++; i < runs.size(); i = next++) train_one(runs[i]);
      });
    }
    for (auto& t : pool_threads) t.join();
  }
  for (const auto& r : runs) {
    if (r.error) std::rethrow_exception(r.error);
  }

  json summary = {{"family", models::to_string(c.gan.family)}, {"classes", json::array()}};
  bool all_converged = true;
  for (const auto& r : runs) {
    const auto& res = r.result;
    all_converged = all_converged && res.converged;
    summary["classes"].push_back({{"activity", r.activity},
                                  {"converged", res.converged},
                                  {"converged_epoch", res.converged_epoch ? json(*res.converged_epoch) : json()},
                                  {"collapsed", res.collapsed},
                                  {"best_gate_f1", res.best_gate_f1 ? json(*res.best_gate_f1) : json()},
                                  {"epochs", res.log.size()},
                                  {"seconds", res.total_seconds}});
    log << "class " << r.activity << ": " << (res.converged ? "gate reached" : "gate not reached") << " after "
        << res.log.size() << " epoch(s)";
    if (res.best_gate_f1) log << ", best gate F1 " << *res.best_gate_f1;
    if (res.collapsed) log << ", collapsed";
    log << "\n";
  }
  summary["all_converged"] = all_converged;
  fs::create_directories(out);
  eval::write_json(summary, out / "summary.json");
  write_run_config(c, out);
  return all_converged ? kExitOk : kExitGateNotReached;
}

fs::path cmd_generate(const GenerateOptions& opts, std::ostream& log) {
  if (!opts.seed) throw UsageError("generate needs --seed");
  if (opts.out.empty()) throw UsageError("generate needs --out");
  require_exists(opts.checkpoint, "generator checkpoint");
  json meta;
  const auto g = models::load_generator(opts.checkpoint, &meta);
  if (!meta.contains("activity")) throw DataError("generator checkpoint does not name its activity");
  const int activity = meta.at("activity").get<int>();

  data::WindowedDataset ds{g->profile(), {}};
  if (opts.count > 0) {
    NoGradGuard guard;
    Rng rng(*opts.seed);
    const Tensor x = g->sample(opts.count, rng);
    const std::size_t C = ds.profile.channels, L = ds.profile.length;
    for (std::size_t i = 0; i < opts.count; ++i) {
      const auto v = x.data().subspan(i * C * L, C * L);
      ds.windows.push_back({Tensor({C, L}, {v.begin(), v.end()}), activity, 0});
    }
  }
  const fs::path manifest = data::save_windowed(ds, opts.out, stats_from_json(meta.value("normalization", json())));
  log << "generated " << opts.count << " window(s) of activity " << activity << ": " << manifest.string() << "\n";
  return manifest;
}

json cmd_evaluate(const EvaluateOptions& opts, std::ostream& log) {
  if (!opts.seed) throw UsageError("evaluate needs --seed");
  if (opts.out.empty()) throw UsageError("evaluate needs --out");
  if (opts.generator.has_value() == opts.windows.has_value()) {
    throw UsageError("evaluate needs exactly one of --generator and --windows");
  }
  require_exists(opts.classifier, "classifier checkpoint");
  require_exists(opts.real, "real manifest");

  json clf_meta;
  const auto classifier = models::load_classifier(opts.classifier, &clf_meta);
  const auto& profile = classifier->profile();
  const auto stats = stats_from_json(clf_meta.value("normalization", json()));
  if (!stats) throw DataError("classifier checkpoint carries no normalization statistics");

  auto real = data::load_windowed(opts.real);
  require_same_profile(real.dataset.profile, profile, "the real manifest");
  const data::WindowedDataset real_norm = real.stats ? real.dataset : data::apply_normalize(real.dataset, *stats);

  Rng rng(*opts.seed);
  data::WindowedDataset synthetic{profile, {}};
  std::unique_ptr<models::Generator> generator;
  if (opts.generator) {
    require_exists(*opts.generator, "generator checkpoint");
    json meta;
    generator = models::load_generator(*opts.generator, &meta);
    require_same_profile(generator->profile(), profile, "the generator");
    if (!meta.contains("activity")) throw DataError("generator checkpoint does not name its activity");
    const int activity = meta.at("activity").get<int>();
    Rng gen_rng = rng.fork();
    NoGradGuard guard;
    const Tensor x = generator->sample(opts.gate_samples, gen_rng);
    const std::size_t C = profile.channels, L = profile.length;
    for (std::size_t i = 0; i < opts.gate_samples; ++i) {
      const auto v = x.data().subspan(i * C * L, C * L);
      synthetic.windows.push_back({Tensor({C, L}, {v.begin(), v.end()}), activity, 0});
    }
  } else {
    require_exists(*opts.windows, "window manifest");
    auto loaded = data::load_windowed(*opts.windows);
    require_same_profile(loaded.dataset.profile, profile, "the synthetic windows");
    synthetic = loaded.stats ? loaded.dataset : data::apply_normalize(loaded.dataset, *stats);
  }
  if (synthetic.empty()) throw DataError("no synthetic windows to evaluate");

  // Classification of the synthetic windows against their intended class.
  std::vector<std::size_t> truth;
  for (const auto& w : synthetic.windows) {
    const auto idx = profile.class_index(w.label);
    if (!idx) throw DataError("synthetic window labelled with unknown activity " + std::to_string(w.label));
    truth.push_back(*idx);
  }
  const auto pred = classifier->predict(synthetic.all());
  const auto report = eval::f1_and_confusion(pred, truth, profile.num_classes());
  fs::create_directories(opts.out);
  eval::write_evaluation(report, opts.out, "synthetic", class_names(profile));

  // Channel correlation per synthetic class.
  eval::CorrelationReport corr;
  corr.channel_names = profile.channel_names;
  json gate = json::object();
  for (const auto& [activity, bucket] : data::partition_by_class(synthetic)) {
    gate[std::to_string(activity)] = eval::binary_f1(pred, truth, *profile.class_index(activity));
    eval::WindowSampler sampler;
    if (generator) {
      sampler = [&](std::size_t n, Rng& r) {
        NoGradGuard guard;
        return generator->sample(n, r);
      };
    } else {
      const data::WindowedDataset& b = bucket;
      sampler = [&b](std::size_t n, Rng&) {
        if (n > b.size()) throw DataError("fewer synthetic windows than correlation samples");
        std::vector<std::size_t> idx(n);
        for (std::size_t i = 0; i < n; ++i) idx[i] = i;
        return b.batch(idx);
      };
    }
    Rng corr_rng = rng.fork();
    corr.rows.push_back(eval::channel_correlation_report(real_norm, sampler, activity, opts.samples, corr_rng));
  }
  eval::write_correlation(corr, opts.out, "correlation");

  json summary = {{"gate_f1", gate},
                  {"macro_f1", report.macro_f1},
                  {"synthetic_windows", synthetic.size()},
                  {"correlation", corr.to_json()}};
  eval::write_json(summary, opts.out / "evaluation.json");
  for (const auto& row : corr.rows) {
    log << "activity " << row.class_id << ": gate F1 " << gate[std::to_string(row.class_id)].get<double>()
        << ", channels with r >= " << corr.threshold << ": " << row.passed() << "/" << row.r.size() << "\n";
  }
  return summary;
}

eval::BenchmarkResult cmd_benchmark(const BenchmarkOptions& opts, std::ostream& log) {
  if (opts.out.empty()) throw UsageError("benchmark needs --out");
  struct Side {
    RunConfig config;
    data::WindowedDataset bucket;
    std::unique_ptr<models::Classifier> classifier;
    std::unique_ptr<models::Generator> g;
    std::unique_ptr<models::Discriminator> d;
    std::unique_ptr<train::GanSession> session;
  };
  auto prepare = [&](const fs::path& path, Side& s) {
    s.config = load_run_config(path);
    if (opts.seed) s.config.seed = *opts.seed;
    const std::uint64_t seed = s.config.require_seed();
    if (s.config.manifest.empty() && !s.config.out.empty()) s.config.manifest = s.config.out / kWindowsDir;
    require_exists(s.config.manifest, "manifest");
    const auto loaded = data::load_windowed(s.config.manifest);
    const auto& profile = loaded.dataset.profile;
    data::WindowedDataset ds = loaded.stats ? loaded.dataset : data::apply_normalize(loaded.dataset, data::fit_normalize(loaded.dataset));
    if (!s.config.gan.classifier.empty()) {
      require_exists(s.config.gan.classifier, "classifier checkpoint");
      s.classifier = models::load_classifier(s.config.gan.classifier);
      require_same_profile(profile, s.classifier->profile(), path.string());
    }
    const auto buckets = data::partition_by_class(ds);
    if (buckets.empty()) throw DataError(s.config.manifest.string() + " holds no windows");
    const int activity = s.config.gan.classes.empty() ? buckets.begin()->first : s.config.gan.classes.front();
    if (!buckets.count(activity)) throw DataError("no windows of activity " + std::to_string(activity));
    s.bucket = buckets.at(activity);
    Rng master(seed);
    Rng init = master.fork();
    const json model_cfg = s.config.gan_model_config(profile);
    s.g = models::build_generator(s.config.gan.family, model_cfg, init);
    s.d = models::build_discriminator(s.config.gan.family, model_cfg, init);
    train::GanTrainConfig tc = s.config.gan.training;
    tc.seed = master.next_u64();
    s.session = std::make_unique<train::GanSession>(*s.g, *s.d, s.bucket, s.classifier.get(), tc);
  };
  Side a, b;
  prepare(opts.baseline, a);
  prepare(opts.candidate, b);
  const std::string a_name = models::to_string(a.config.gan.family) + ":" + opts.baseline.filename().string();
  const std::string b_name = models::to_string(b.config.gan.family) + ":" + opts.candidate.filename().string();
  const auto result = eval::benchmark_epoch_time(
      a_name, [&] { a.session->run_epoch(); }, b_name, [&] { b.session->run_epoch(); }, opts.warmup, opts.epochs);

  json j = result.to_json();
  j["baseline"]["parameters"] = models::count_params(*a.g) + models::count_params(*a.d);
  j["candidate"]["parameters"] = models::count_params(*b.g) + models::count_params(*b.d);
  j["baseline"]["batches_per_epoch"] = (a.bucket.size() + a.config.gan.training.batch_size - 1) / a.config.gan.training.batch_size;
  j["candidate"]["batches_per_epoch"] = (b.bucket.size() + b.config.gan.training.batch_size - 1) / b.config.gan.training.batch_size;
  fs::create_directories(opts.out);
  eval::write_json(j, opts.out / "benchmark.json");
  log << a_name << " mean " << result.baseline.mean << " s/epoch, " << b_name << " mean " << result.candidate.mean
      << " s/epoch, speedup " << result.speedup << "\n";
  return result;
}

}  // namespace hargan::cli
