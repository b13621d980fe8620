#include <filesystem>
#include <ostream>

#include "CLI11.hpp"
#include "hargan/cli/commands.hpp"
#include "hargan/core/errors.hpp"

namespace hargan::cli {

namespace {

void add_common(CLI::App* cmd, CommonOptions& c) {
  cmd->add_option("--config", c.config, "run config (JSON, with a version field)");
  cmd->add_option("--seed", c.seed, "seed for every random stream");
  cmd->add_option("--out", c.out, "output directory");
  cmd->add_option("--profile", c.profile, "dataset profile: preset name or JSON file");
  cmd->add_option("--jobs", c.jobs, "parallel class-GAN runs")->check(CLI::PositiveNumber);
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Per-class GAN augmentation for wearable-sensor activity windows", "hargan"};
  app.require_subcommand(1);

  IngestOptions ingest;
  auto* c_ingest = app.add_subcommand("ingest", "window a raw recording into the manifest format");
  add_common(c_ingest, ingest.common);
  c_ingest->add_option("--format", ingest.format, "canonical-csv | pamap2 | toy");
  c_ingest->add_option("--input", ingest.input, "CSV file or PAMAP2 Protocol directory");
  c_ingest->add_option("--stride", ingest.stride, "window stride in samples (default length / 2)");

  TrainClassifierOptions tclf;
  auto* c_tclf = app.add_subcommand("train-classifier", "train the validation classifier (LOSO split)");
  add_common(c_tclf, tclf.common);
  c_tclf->add_option("--manifest", tclf.manifest, "ingested windows");
  c_tclf->add_option("--validation-subject", tclf.validation_subject, "held-out subject id");

  TrainGanOptions tgan;
  auto* c_tgan = app.add_subcommand("train-gan", "train one GAN per class against a frozen classifier");
  add_common(c_tgan, tgan.common);
  c_tgan->add_option("--manifest", tgan.manifest, "ingested windows");
  c_tgan->add_option("--classifier", tgan.classifier, "classifier checkpoint used by the gate");
  c_tgan->add_option("--family", tgan.family, "rgan | tgan");
  c_tgan->add_option("--max-epochs", tgan.max_epochs, "epoch budget per class");
  c_tgan->add_option("--classes", tgan.classes, "activity ids to train (default: all)")->delimiter(',');

  GenerateOptions gen;
  CommonOptions gen_common;
  auto* c_gen = app.add_subcommand("generate", "sample windows from a generator checkpoint");
  add_common(c_gen, gen_common);
  c_gen->add_option("--checkpoint", gen.checkpoint, "generator checkpoint")->required();
  c_gen->add_option("-n,--count", gen.count, "number of windows")->required();

  EvaluateOptions ev;
  CommonOptions ev_common;
  auto* c_ev = app.add_subcommand("evaluate", "gate F1, confusion matrix and channel correlation");
  add_common(c_ev, ev_common);
  c_ev->add_option("--classifier", ev.classifier, "classifier checkpoint")->required();
  c_ev->add_option("--generator", ev.generator, "generator checkpoint");
  c_ev->add_option("--windows", ev.windows, "synthetic window manifest");
  c_ev->add_option("--real", ev.real, "real window manifest")->required();
  c_ev->add_option("--samples", ev.samples, "X windows per class for the correlation report");
  c_ev->add_option("--gate-samples", ev.gate_samples, "windows drawn from the generator");

  BenchmarkOptions bench;
  CommonOptions bench_common;
  auto* c_bench = app.add_subcommand("benchmark", "compare mean epoch time of two GAN configs");
  add_common(c_bench, bench_common);
  c_bench->add_option("--baseline", bench.baseline, "baseline run config")->required();
  c_bench->add_option("--candidate", bench.candidate, "candidate run config")->required();
  c_bench->add_option("--epochs", bench.epochs, "timed epochs (>= 3)");
  c_bench->add_option("--warmup", bench.warmup, "discarded warm-up epochs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*c_ingest) {
      cmd_ingest(ingest, out);
    } else if (*c_tclf) {
      return cmd_train_classifier(tclf, out);
    } else if (*c_tgan) {
      return cmd_train_gan(tgan, out);
    } else if (*c_gen) {
      // A config may supply seed and out; flags win.
      const RunConfig rc = resolve_run_config(gen_common);
      gen.seed = rc.seed;
      gen.out = rc.out;
      cmd_generate(gen, out);
    } else if (*c_ev) {
      const RunConfig rc = resolve_run_config(ev_common);
      ev.seed = rc.seed;
      ev.out = rc.out;
      cmd_evaluate(ev, out);
    } else if (*c_bench) {
      const RunConfig rc = resolve_run_config(bench_common);
      bench.seed = bench_common.seed;
      bench.out = rc.out;
      cmd_benchmark(bench, out);
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const ShapeError& e) {
    err << "shape error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "file error: " << e.what() << "\n";
    return kExitData;
  }
  return kExitOk;
}

}  // namespace hargan::cli
