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

#include "slicedp/trainer.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>

#include "slicedp/errors.h"
#include "slicedp/rng.h"

namespace slicedp {
namespace {

std::vector<std::size_t> EpochOrder(std::size_t n, std::uint64_t seed,
                                    std::uint64_t epoch) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  RandomStream stream(seed, "shuffle", epoch);
  for (std::size_t i = n; i > 1; --i) {
    std::swap(order[i - 1], order[stream.UniformInt(i)]);
  }
  return order;
}

// Noise for all m slices; slice s owns rows [s b, (s + 1) b).
std::vector<Matrix> SyntheticNoise(std::size_t slices, std::size_t batch,
                                   std::size_t k, double sigma,
                                   std::uint64_t seed, std::uint64_t index) {
  RandomStream stream(seed, "syn-noise", index);
  std::vector<Matrix> noise;
  noise.reserve(slices);
  for (std::size_t s = 0; s < slices; ++s) {
    Matrix v(batch, k);
    stream.FillNormal(v.values(), sigma);
    noise.push_back(std::move(v));
  }
  return noise;
}

std::vector<std::size_t> SliceSubset(std::size_t m, std::size_t count,
                                     std::uint64_t seed, std::uint64_t step) {
  std::vector<std::size_t> all(m);
  std::iota(all.begin(), all.end(), std::size_t{0});
  if (count == 0 || count >= m) return all;
  RandomStream stream(seed, "slices", step);
  for (std::size_t i = 0; i < count; ++i) {
    std::swap(all[i], all[i + stream.UniformInt(m - i)]);
  }
  all.resize(count);
  std::sort(all.begin(), all.end());
  return all;
}

Matrix Latents(std::size_t rows, std::size_t dim, std::uint64_t seed,
               std::string_view label, std::uint64_t index) {
  Matrix z(rows, dim);
  RandomStream stream(seed, label, index);
  stream.FillNormal(z.values(), 1.0);
  return z;
}

void CheckCompatible(const SliceBundle& bundle, const GeneratorModel& model,
                     const TrainConfig& cfg) {
  cfg.Validate();
  bundle.dims.Validate();
  Require(model.output_dim() == bundle.dims.d, ErrorCode::kInvalidArgument,
          "generator output width " + std::to_string(model.output_dim()) +
              " does not match bundle dimension d = " +
              std::to_string(bundle.dims.d));
  Require(bundle.projections.rows() == bundle.dims.d &&
              bundle.projections.cols() == bundle.dims.m_prime() &&
              bundle.noisy.cols() == bundle.dims.m_prime(),
          ErrorCode::kInvalidArgument, "slice bundle has inconsistent shapes");
  Require(bundle.num_records() >= 2, ErrorCode::kInvalidArgument,
          "slice bundle holds fewer than 2 records");
  Require(bundle.sigma > 0.0 && std::isfinite(bundle.sigma),
          ErrorCode::kInvalidArgument, "slice bundle sigma must be positive");
  const auto finite = [](const Matrix& m) {
    return std::all_of(m.values().begin(), m.values().end(),
                       [](double v) { return std::isfinite(v); });
  };
  Require(finite(bundle.projections) && finite(bundle.noisy),
          ErrorCode::kInvalidArgument, "slice bundle holds non-finite values");
  Require(cfg.loss != LossKind::kSlicedWasserstein || bundle.dims.k == 1,
          ErrorCode::kInvalidArgument,
          "the sliced Wasserstein loss needs k = 1");
}

std::uint64_t TotalSteps(const TrainConfig& cfg, std::size_t per_epoch) {
  return cfg.epochs ? *cfg.epochs * per_epoch : cfg.max_steps;
}

class StepRunner {
 public:
  StepRunner(const SliceBundle& bundle, const TrainConfig& cfg)
      : bundle_(bundle),
        cfg_(cfg),
        all_slices_(SlicesView(bundle)),
        batch_(std::min(cfg.batch_size, bundle.num_records())),
        per_epoch_(StepsPerEpoch(bundle.num_records(), cfg.batch_size)) {}

  std::size_t per_epoch() const { return per_epoch_; }

  // Loss and generator gradient for step `step`.
  std::pair<double, Parameters> Run(const GeneratorModel& model,
                                    std::uint64_t step) {
    const std::uint64_t epoch = step / per_epoch_;
    const std::size_t position = step % per_epoch_;
    if (!order_epoch_ || *order_epoch_ != epoch) {
      order_ = EpochOrder(bundle_.num_records(), cfg_.seed, epoch);
      order_epoch_ = epoch;
    }
    std::span<const std::size_t> rows(order_.data() + position * batch_,
                                      batch_);
    const Matrix z =
        Latents(batch_, model.latent_dim(), cfg_.seed, "latent", step);
    const std::uint64_t noise_index =
        cfg_.noise == NoiseSchedule::kPerStep ? step : epoch;
    const std::vector<std::size_t> chosen = SliceSubset(
        all_slices_.size(), cfg_.slices_per_step, cfg_.seed, step);
    return Evaluate(model, rows, z, noise_index, chosen, /*with_grad=*/true);
  }

  std::pair<double, Parameters> Evaluate(const GeneratorModel& model,
                                         std::span<const std::size_t> rows,
                                         const Matrix& z,
                                         std::uint64_t noise_index,
                                         std::span<const std::size_t> chosen,
                                         bool with_grad) {
    const std::size_t k = bundle_.dims.k;
    const Matrix real = bundle_.noisy.GatherRows(rows);
    const std::vector<Matrix> all_noise =
        SyntheticNoise(all_slices_.size(), rows.size(), k, bundle_.sigma,
                       cfg_.seed, noise_index);
    std::vector<Slice> slices;
    std::vector<Matrix> noise;
    slices.reserve(chosen.size());
    noise.reserve(chosen.size());
    for (std::size_t s : chosen) {
      slices.push_back({all_slices_[s].theta, real.ColumnBlock(s * k, k)});
      noise.push_back(all_noise[s]);
    }
    ForwardResult fwd = Forward(model, z);
    LossAndGradient lg =
        cfg_.loss == LossKind::kSmoothedSliced
            ? SmoothedSlicedLoss(slices, fwd.output, noise, cfg_.f,
                                 cfg_.kernel, cfg_.threads)
            : SlicedWassersteinLoss(slices, fwd.output, noise);
    if (!std::isfinite(lg.loss)) return {lg.loss, {}};
    if (!with_grad) return {lg.loss, {}};
    return {lg.loss, Backward(model, fwd.tape, lg.grad_syn)};
  }

 private:
  const SliceBundle& bundle_;
  const TrainConfig& cfg_;
  std::vector<Slice> all_slices_;
  std::size_t batch_;
  std::size_t per_epoch_;
  std::vector<std::size_t> order_;
  std::optional<std::uint64_t> order_epoch_;
};

TrainResult RunFrom(const SliceBundle& bundle, GeneratorModel model,
                    OptimizerState optimizer, std::uint64_t start,
                    const TrainConfig& cfg) {
  StepRunner runner(bundle, cfg);
  const std::uint64_t total = TotalSteps(cfg, runner.per_epoch());
  TrainResult result{std::move(model), std::move(optimizer), start, {}};
  if (cfg.checkpoint_interval > 0 && !cfg.checkpoint_dir.empty()) {
    std::filesystem::create_directories(cfg.checkpoint_dir);
  }
  auto epoch_start = std::chrono::steady_clock::now();
  for (std::uint64_t step = start; step < total; ++step) {
    auto [loss, grad] = runner.Run(result.model, step);
    if (!std::isfinite(loss)) {
      Fail(ErrorCode::kNumerical,
           "non-finite loss at step " + std::to_string(step) +
               "; check the kernel ridge and bandwidth settings or lower "
               "the learning rate");
    }
    AdamStep(result.model, result.optimizer, grad);
    result.step = step + 1;
    result.history.steps.push_back(step);
    result.history.losses.push_back(loss);
    if (result.step % runner.per_epoch() == 0) {
      const auto now = std::chrono::steady_clock::now();
      result.history.epoch_seconds.push_back(
          std::chrono::duration<double>(now - epoch_start).count());
      epoch_start = now;
    }
    if (cfg.checkpoint_interval > 0 &&
        result.step % cfg.checkpoint_interval == 0) {
      const std::string id = "checkpoint-" + std::to_string(result.step);
      if (!cfg.checkpoint_dir.empty()) {
        SaveCheckpoint(cfg.checkpoint_dir / (id + ".bin"),
                       result.ToCheckpoint());
      }
      result.history.checkpoints.push_back(id);
    }
  }
  return result;
}

}  // namespace

void TrainConfig::Validate() const {
  Require(batch_size >= 2, ErrorCode::kInvalidArgument,
          "batch size must be at least 2");
  Require(adam.learning_rate > 0.0 && std::isfinite(adam.learning_rate),
          ErrorCode::kInvalidArgument, "learning rate must be positive");
  Require(threads >= 1, ErrorCode::kInvalidArgument,
          "thread count must be at least 1");
  kernel.Validate();
}

void TrainHistory::WriteCsv(std::ostream& out) const {
  out << "step,loss\n";
  for (std::size_t i = 0; i < losses.size(); ++i) {
    out << steps[i] << ',' << FormatNumber(losses[i]) << '\n';
  }
}

void TrainHistory::SaveCsv(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) Fail(ErrorCode::kIo, "cannot write " + path.string());
  WriteCsv(out);
}

std::size_t StepsPerEpoch(std::size_t num_records, std::size_t batch_size) {
  Require(num_records >= 1 && batch_size >= 1, ErrorCode::kInvalidArgument,
          "empty bundle or batch");
  return num_records / std::min(batch_size, num_records);
}

TrainResult Train(const SliceBundle& bundle, GeneratorModel model,
                  const TrainConfig& cfg) {
  CheckCompatible(bundle, model, cfg);
  OptimizerState optimizer = OptimizerState::For(model, cfg.adam);
  return RunFrom(bundle, std::move(model), std::move(optimizer), 0, cfg);
}

TrainResult Resume(const SliceBundle& bundle, const Checkpoint& checkpoint,
                   const TrainConfig& cfg) {
  CheckCompatible(bundle, checkpoint.model, cfg);
  OptimizerState optimizer =
      checkpoint.optimizer
          ? *checkpoint.optimizer
          : OptimizerState::For(checkpoint.model, cfg.adam);
  optimizer.options = cfg.adam;
  return RunFrom(bundle, checkpoint.model, std::move(optimizer),
                 checkpoint.trainer_step, cfg);
}

double EvaluateLoss(const SliceBundle& bundle, const GeneratorModel& model,
                    const TrainConfig& cfg, std::uint64_t eval_seed) {
  CheckCompatible(bundle, model, cfg);
  TrainConfig eval_cfg = cfg;
  eval_cfg.seed = eval_seed;
  StepRunner runner(bundle, eval_cfg);
  const std::size_t batch = std::min(cfg.batch_size, bundle.num_records());
  const std::vector<std::size_t> order =
      EpochOrder(bundle.num_records(), eval_seed, 0);
  const Matrix z = Latents(batch, model.latent_dim(), eval_seed, "eval", 0);
  std::vector<std::size_t> all(bundle.dims.m);
  std::iota(all.begin(), all.end(), std::size_t{0});
  return runner
      .Evaluate(model, std::span(order.data(), batch), z, 0, all, false)
      .first;
}

Table Generate(const GeneratorModel& model, std::size_t count,
               const Encoding& encoding, std::uint64_t seed) {
  Require(model.output_dim() == encoding.width, ErrorCode::kInvalidArgument,
          "generator output width " + std::to_string(model.output_dim()) +
              " does not match the schema's encoded width " +
              std::to_string(encoding.width));
  if (count == 0) return Table::Empty(encoding.schema);
  const Matrix z = Latents(count, model.latent_dim(), seed, "generate", 0);
  return Decode(Sample(model, z), encoding);
}

}  // namespace slicedp
