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

// Generator training against a released SliceBundle. The trainer only ever
// sees the bundle (projections, noisy projections, sigma), the configuration
// and seeds; it has no access to the encoded private table.

#ifndef SLICEDP_TRAINER_H_
#define SLICEDP_TRAINER_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "slicedp/divergence.h"
#include "slicedp/generator.h"
#include "slicedp/mechanism.h"
#include "slicedp/schema.h"

namespace slicedp {

enum class LossKind { kSmoothedSliced, kSlicedWasserstein };

// How often the synthetic-side noise is redrawn.
enum class NoiseSchedule { kPerStep, kPerEpoch };

struct TrainConfig {
  std::size_t batch_size = 128;
  // Total optimizer steps, counted from a fresh model. Ignored when `epochs`
  // is set.
  std::uint64_t max_steps = 1000;
  std::optional<std::uint64_t> epochs;
  AdamOptions adam;
  LossKind loss = LossKind::kSmoothedSliced;
  FDivGenerator f{FDivKind::kKL};
  KernelConfig kernel;
  std::uint64_t seed = 0;
  NoiseSchedule noise = NoiseSchedule::kPerStep;
  // 0 uses all m slices every step.
  std::size_t slices_per_step = 0;
  // 0 disables periodic checkpoints.
  std::uint64_t checkpoint_interval = 0;
  std::filesystem::path checkpoint_dir;
  int threads = 1;

  void Validate() const;
};

struct TrainHistory {
  std::vector<std::uint64_t> steps;
  std::vector<double> losses;
  std::vector<double> epoch_seconds;
  std::vector<std::string> checkpoints;

  // "step,loss" rows; losses in shortest round-trip form.
  void WriteCsv(std::ostream& out) const;
  void SaveCsv(const std::filesystem::path& path) const;
};

struct TrainResult {
  GeneratorModel model;
  OptimizerState optimizer;
  std::uint64_t step = 0;
  TrainHistory history;

  Checkpoint ToCheckpoint() const { return {model, optimizer, step}; }
};

// Batches per epoch for a bundle of n records: floor(n / b) with b clamped
// to n.
std::size_t StepsPerEpoch(std::size_t num_records, std::size_t batch_size);

// Steps are a pure function of (bundle, cfg, step index): real batches come
// from an epoch-wise shuffle, latents, synthetic noise and slice subsets from
// step-indexed streams of cfg.seed.
TrainResult Train(const SliceBundle& bundle, GeneratorModel model,
                  const TrainConfig& cfg);

// Continues from a checkpoint; with identical bundle and configuration the
// final model is bit-identical to an uninterrupted run.
TrainResult Resume(const SliceBundle& bundle, const Checkpoint& checkpoint,
                   const TrainConfig& cfg);

// Loss of `model` on a fixed evaluation batch: `batch_size` records (first
// in an epoch-0 shuffle of eval_seed), fresh latents and noise, all slices.
double EvaluateLoss(const SliceBundle& bundle, const GeneratorModel& model,
                    const TrainConfig& cfg, std::uint64_t eval_seed);

// Draws `count` latents from `seed`, forwards and decodes.
Table Generate(const GeneratorModel& model, std::size_t count,
               const Encoding& encoding, std::uint64_t seed);

}  // namespace slicedp

#endif  // SLICEDP_TRAINER_H_
