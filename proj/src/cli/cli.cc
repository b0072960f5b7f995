// Copyright 2026 The slicedp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "slicedp/cli.h"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "slicedp/accounting.h"
#include "slicedp/csv.h"
#include "slicedp/evaluate.h"
#include "slicedp/generator.h"
#include "slicedp/mechanism.h"
#include "slicedp/schema.h"
#include "slicedp/trainer.h"

namespace slicedp {
namespace {

namespace fs = std::filesystem;

constexpr char kBundleFile[] = "bundle.bin";
constexpr char kPrivacyFile[] = "privacy.json";
constexpr char kSchemaFile[] = "schema.txt";
constexpr char kModelFile[] = "model.bin";
constexpr char kHistoryFile[] = "history.csv";

struct GlobalOptions {
  std::uint64_t seed = 0;
  int threads = 1;
};

struct AccountOptions {
  double sigma = 0.0;
  double epsilon = 0.0;
  double delta = 0.0;
  std::size_t d = 0;
  std::size_t k = 1;
  std::size_t m = 0;
  double alpha = 0.0;
  double rate = 1.0;
  std::string json;
};

struct SliceOptions {
  std::string input;
  std::string schema;
  std::string out;
  std::size_t k = 1;
  std::size_t m = 0;
  double sigma = 0.0;
  double epsilon = 0.0;
  double delta = 0.0;
  double rate = 1.0;
};

struct TrainOptions {
  std::string dir;
  std::string resume;
  std::uint64_t steps = 1000;
  std::uint64_t epochs = 0;
  std::size_t batch_size = 128;
  double lr = AdamOptions{}.learning_rate;
  std::string loss = "sliced-f";
  std::string f = "kl";
  double ridge = KernelConfig{}.ridge;
  std::vector<double> multipliers = KernelConfig{}.multipliers;
  std::size_t latent_dim = 16;
  std::vector<std::size_t> hidden{128, 128};
  std::string noise = "step";
  std::string init = "domain";
  std::size_t slices_per_step = 0;
  std::uint64_t checkpoint_interval = 0;
};

struct GenerateOptions {
  std::string dir;
  std::string model;
  std::size_t rows = 0;
  std::string output;
};

struct EvaluateCliOptions {
  std::string real;
  std::string synthetic;
  std::string schema;
  std::string target;
  std::string output;
};

void RequireStageInput(const fs::path& path, const std::string& hint) {
  if (!fs::exists(path)) {
    Fail(ErrorCode::kIo, "missing " + path.string() + "; " + hint);
  }
}

void WriteTextFile(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) Fail(ErrorCode::kIo, "cannot write " + path.string());
  out << text;
  if (!out) Fail(ErrorCode::kIo, "failed writing " + path.string());
}

std::string Fixed6(double v) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.6f", v);
  return buffer;
}

int RunAccount(const AccountOptions& o, const CLI::App& cmd,
               std::ostream& out) {
  const MechanismDims dims{o.d, o.k, o.m};
  dims.Validate();
  const bool has_sigma = cmd.count("--sigma") > 0;
  const std::optional<double> rate =
      cmd.count("--rate") > 0 ? std::optional<double>(o.rate) : std::nullopt;
  if (cmd.count("--alpha") > 0) {
    Require(has_sigma, ErrorCode::kInvalidArgument,
            "--alpha requires --sigma");
    const double eps = EpsilonAt(o.sigma, dims, o.alpha, o.delta);
    out << "alpha                   " << Fixed6(o.alpha) << "\n";
    out << "gamma                   " << Fixed6(Gamma(o.sigma, o.alpha))
        << "\n";
    out << "epsilon(alpha)          " << Fixed6(eps) << "\n";
    out << "deterministic epsilon   "
        << Fixed6(DeterministicEpsilon(o.sigma, dims.m, o.alpha, o.delta))
        << " (fixed projection, same alpha)\n";
    return kExitOk;
  }
  const PrivacyReport report =
      has_sigma ? AccountForSigma(o.sigma, dims, o.delta, rate)
                : CalibrateForBudget(o.epsilon, o.delta, dims, rate);
  out << FormatPrivacyReport(report);
  if (!o.json.empty()) WriteTextFile(o.json, PrivacyReportToJson(report));
  return kExitOk;
}

int RunSlice(const SliceOptions& o, const CLI::App& cmd,
             const GlobalOptions& g, std::ostream& out) {
  const ColumnSchema schema = ColumnSchema::Load(o.schema);
  const RawTable raw = ReadCsvFile(o.input);
  EncodedMatrix x = Encode(raw, schema);
  const MechanismDims dims{x.encoding.width, o.k, o.m};
  dims.Validate();
  const bool subsample = cmd.count("--rate") > 0 && o.rate < 1.0;
  const std::optional<double> rate =
      cmd.count("--rate") > 0 ? std::optional<double>(o.rate) : std::nullopt;
  const PrivacyReport report =
      cmd.count("--sigma") > 0
          ? AccountForSigma(o.sigma, dims, o.delta, rate)
          : CalibrateForBudget(o.epsilon, o.delta, dims, rate);
  if (subsample) x = PoissonSubsample(x, o.rate, g.seed);
  const SliceBundle bundle =
      ApplyMechanism(x, dims, report.sigma, g.seed, g.threads);

  const fs::path dir(o.out);
  fs::create_directories(dir);
  SaveBundle(dir / kBundleFile, bundle);
  WriteTextFile(dir / kPrivacyFile, PrivacyReportToJson(report));
  WriteTextFile(dir / kSchemaFile, schema.Serialize());
  out << FormatPrivacyReport(report);
  out << "records released        " << bundle.num_records() << "\n";
  out << "wrote " << (dir / kBundleFile).string() << "\n";
  return kExitOk;
}

TrainConfig MakeTrainConfig(const TrainOptions& o, const CLI::App& cmd,
                            const GlobalOptions& g) {
  TrainConfig cfg;
  cfg.batch_size = o.batch_size;
  cfg.max_steps = o.steps;
  if (cmd.count("--epochs") > 0) cfg.epochs = o.epochs;
  cfg.adam.learning_rate = o.lr;
  if (o.loss == "sliced-f") {
    cfg.loss = LossKind::kSmoothedSliced;
  } else if (o.loss == "sw1d") {
    cfg.loss = LossKind::kSlicedWasserstein;
  } else {
    Fail(ErrorCode::kInvalidArgument,
         "unknown loss '" + o.loss + "' (expected sliced-f or sw1d)");
  }
  cfg.f = FDivGenerator::FromName(o.f);
  cfg.kernel.ridge = o.ridge;
  cfg.kernel.multipliers = o.multipliers;
  cfg.seed = g.seed;
  if (o.noise == "step") {
    cfg.noise = NoiseSchedule::kPerStep;
  } else if (o.noise == "epoch") {
    cfg.noise = NoiseSchedule::kPerEpoch;
  } else {
    Fail(ErrorCode::kInvalidArgument,
         "unknown noise schedule '" + o.noise + "' (expected step or epoch)");
  }
  cfg.slices_per_step = o.slices_per_step;
  cfg.checkpoint_interval = o.checkpoint_interval;
  cfg.checkpoint_dir = fs::path(o.dir) / "checkpoints";
  cfg.threads = g.threads;
  cfg.Validate();
  return cfg;
}

int RunTrain(const TrainOptions& o, const CLI::App& cmd,
             const GlobalOptions& g, std::ostream& out, std::ostream& err) {
  const fs::path dir(o.dir);
  RequireStageInput(dir / kBundleFile, "run `slicedp slice --out " +
                                           dir.string() + "` first");
  const SliceBundle bundle = LoadBundle(dir / kBundleFile);
  const TrainConfig cfg = MakeTrainConfig(o, cmd, g);
  if (cfg.batch_size > bundle.num_records()) {
    err << "warning: batch size " << cfg.batch_size << " exceeds the "
        << bundle.num_records() << " released records; using "
        << bundle.num_records() << "\n";
  }

  TrainResult result;
  if (!o.resume.empty()) {
    RequireStageInput(o.resume, "pass a checkpoint written by `train`");
    result = Resume(bundle, LoadCheckpoint(o.resume), cfg);
  } else {
    std::vector<std::size_t> dims{o.latent_dim};
    dims.insert(dims.end(), o.hidden.begin(), o.hidden.end());
    dims.push_back(bundle.dims.d);
    InitOptions init;
    if (o.init == "domain") {
      init = DomainInit(bundle.dims.d);
    } else if (o.init != "he") {
      Fail(ErrorCode::kInvalidArgument,
           "unknown init '" + o.init + "' (expected domain or he)");
    }
    result = Train(bundle, InitGenerator(dims, g.seed, init), cfg);
  }
  SaveCheckpoint(dir / kModelFile, result.ToCheckpoint());
  result.history.SaveCsv(dir / kHistoryFile);
  const auto& epochs = result.history.epoch_seconds;
  if (!epochs.empty()) {
    double total = 0.0;
    for (double s : epochs) total += s;
    err << "epochs: " << epochs.size() << ", mean wall-clock "
        << total / static_cast<double>(epochs.size()) << " s\n";
  }
  out << "steps                   " << result.step << "\n";
  if (!result.history.losses.empty()) {
    out << "final loss              " << FormatNumber(result.history.losses.back())
        << "\n";
  }
  out << "wrote " << (dir / kModelFile).string() << "\n";
  return kExitOk;
}

int RunGenerate(const GenerateOptions& o, const GlobalOptions& g,
                std::ostream& out) {
  const fs::path dir(o.dir);
  const fs::path model_path = o.model.empty() ? dir / kModelFile : fs::path(o.model);
  RequireStageInput(model_path, "run `slicedp train --dir " + dir.string() +
                                    "` first");
  RequireStageInput(dir / kSchemaFile, "run `slicedp slice --out " +
                                           dir.string() + "` first");
  const ColumnSchema schema = ColumnSchema::Load(dir / kSchemaFile);
  const Checkpoint checkpoint = LoadCheckpoint(model_path);
  const Table table = Generate(checkpoint.model, o.rows,
                               Encoding::ForSchema(schema), g.seed);
  const fs::path output =
      o.output.empty() ? dir / "synthetic.csv" : fs::path(o.output);
  WriteCsvFile(output, FormatTable(table));
  out << "wrote " << table.num_rows() << " rows to " << output.string()
      << "\n";
  return kExitOk;
}

int RunEvaluate(const EvaluateCliOptions& o, std::ostream& out) {
  const ColumnSchema schema = ColumnSchema::Load(o.schema);
  const Table real = ParseTable(ReadCsvFile(o.real), schema);
  const Table syn = ParseTable(ReadCsvFile(o.synthetic), schema);
  EvaluateOptions options;
  options.target = o.target;
  const std::string json = MetricsToJson(Evaluate(real, syn, options));
  if (!o.output.empty()) WriteTextFile(o.output, json);
  out << json;
  return kExitOk;
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"slicedp: private synthetic data from noisy random projections",
               "slicedp"};
  app.require_subcommand(1);
  app.fallthrough();
  GlobalOptions g;
  app.set_config("--config", "",
                 "INI/TOML file; options go under [account], [slice], ...");
  app.add_option("--seed", g.seed, "Master random seed")->capture_default_str();
  app.add_option("--threads", g.threads, "Worker threads")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  AccountOptions ao;
  CLI::App* account =
      app.add_subcommand("account", "Privacy accounting for the mechanism");
  auto* a_sigma = account->add_option("--sigma", ao.sigma, "Noise level")
                      ->check(CLI::PositiveNumber);
  auto* a_eps =
      account->add_option("--epsilon", ao.epsilon, "Target epsilon (calibrate sigma)")
          ->check(CLI::PositiveNumber);
  a_sigma->excludes(a_eps);
  account->add_option("--delta", ao.delta, "Target delta")->required();
  account->add_option("--d", ao.d, "Encoded dimension")->required();
  account->add_option("--k", ao.k, "Slice dimension")->capture_default_str();
  account->add_option("--m", ao.m, "Number of slices")->required();
  account->add_option("--alpha", ao.alpha, "Evaluate at a fixed Renyi order")
      ->excludes(a_eps);
  account->add_option("--rate", ao.rate, "Poisson subsampling rate");
  account->add_option("--json", ao.json, "Also write the report as JSON");

  SliceOptions so;
  CLI::App* slice = app.add_subcommand(
      "slice", "Encode a table and release its noisy projections");
  slice->add_option("--input", so.input, "Private CSV file")->required();
  slice->add_option("--schema", so.schema, "Schema file")->required();
  slice->add_option("--out", so.out, "Output directory")->required();
  slice->add_option("--k", so.k, "Slice dimension")->capture_default_str();
  slice->add_option("--m", so.m, "Number of slices")->required();
  auto* s_sigma =
      slice->add_option("--sigma", so.sigma, "Noise level")->check(CLI::PositiveNumber);
  auto* s_eps = slice->add_option("--epsilon", so.epsilon, "Target epsilon")
                    ->check(CLI::PositiveNumber);
  s_sigma->excludes(s_eps);
  slice->add_option("--delta", so.delta, "Target delta")->required();
  slice->add_option("--rate", so.rate, "Poisson subsampling rate");

  TrainOptions to;
  CLI::App* train =
      app.add_subcommand("train", "Train a generator on a released bundle");
  train->add_option("--dir", to.dir, "Directory written by `slice`")->required();
  train->add_option("--resume", to.resume, "Continue from a checkpoint");
  train->add_option("--steps", to.steps, "Total optimizer steps")->capture_default_str();
  train->add_option("--epochs", to.epochs, "Train for whole epochs instead of --steps");
  train->add_option("--batch-size", to.batch_size, "Batch size")->capture_default_str();
  train->add_option("--lr", to.lr, "Adam learning rate")->capture_default_str();
  train->add_option("--loss", to.loss, "sliced-f or sw1d")->capture_default_str();
  train->add_option("--f", to.f, "kl, chi2 or js")->capture_default_str();
  train->add_option("--ridge", to.ridge, "Kernel ridge")->capture_default_str();
  train->add_option("--bandwidth-multipliers", to.multipliers,
                    "Multiples of the median distance")
      ->delimiter(',')
      ->capture_default_str();
  train->add_option("--latent-dim", to.latent_dim, "Latent width")->capture_default_str();
  train->add_option("--hidden", to.hidden, "Hidden widths, comma separated")
      ->delimiter(',')
      ->capture_default_str();
  train->add_option("--noise", to.noise, "Synthetic noise redraw: step or epoch")
      ->capture_default_str();
  train->add_option("--init", to.init,
                    "Generator start: domain (centered in the encoded range) or he")
      ->capture_default_str();
  train->add_option("--slices-per-step", to.slices_per_step,
                    "Random slice subset per step (0 = all)");
  train->add_option("--checkpoint-interval", to.checkpoint_interval,
                    "Steps between checkpoints (0 = off)");

  GenerateOptions go;
  CLI::App* generate =
      app.add_subcommand("generate", "Sample synthetic rows");
  generate->add_option("--dir", go.dir, "Directory holding model and schema")
      ->required();
  generate->add_option("--model", go.model, "Checkpoint (default DIR/model.bin)");
  generate->add_option("--rows", go.rows, "Number of rows")->required();
  generate->add_option("--output", go.output, "CSV path (default DIR/synthetic.csv)");

  EvaluateCliOptions eo;
  CLI::App* evaluate =
      app.add_subcommand("evaluate", "Score a synthetic table against real data");
  evaluate->add_option("--real", eo.real, "Real (held-out) CSV")->required();
  evaluate->add_option("--synthetic", eo.synthetic, "Synthetic CSV")->required();
  evaluate->add_option("--schema", eo.schema, "Schema file")->required();
  evaluate->add_option("--target", eo.target, "Binary column for logistic F1");
  evaluate->add_option("--output", eo.output, "Write metrics JSON here");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(std::move(reversed));
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    err << app.help();
    return kExitUsage;
  }

  try {
    if (account->parsed()) {
      Require(account->count("--sigma") + account->count("--epsilon") == 1,
              ErrorCode::kInvalidArgument,
              "account: give exactly one of --sigma or --epsilon");
      return RunAccount(ao, *account, out);
    }
    if (slice->parsed()) {
      Require(slice->count("--sigma") + slice->count("--epsilon") == 1,
              ErrorCode::kInvalidArgument,
              "slice: give exactly one of --sigma or --epsilon");
      return RunSlice(so, *slice, g, out);
    }
    if (train->parsed()) return RunTrain(to, *train, g, out, err);
    if (generate->parsed()) return RunGenerate(go, g, out);
    if (evaluate->parsed()) return RunEvaluate(eo, out);
  } catch (const Error& e) {
    err << "error (" << ErrorCodeName(e.code()) << "): " << e.what() << "\n";
    return ExitCodeFor(e.code());
  } catch (const fs::filesystem_error& e) {
    err << "error (io): " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace slicedp
