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

#include <cmath>
#include <filesystem>
#include <sstream>
#include <type_traits>

#include "gtest/gtest.h"
#include "slicedp/errors.h"
#include "slicedp/rng.h"

namespace slicedp {
namespace {

// The trainer consumes released slices only.
static_assert(!std::is_invocable_v<decltype(&Train), const EncodedMatrix&,
                                   GeneratorModel, const TrainConfig&>);
static_assert(!std::is_convertible_v<EncodedMatrix, SliceBundle>);
static_assert(!std::is_convertible_v<EncodedMatrix, Slice>);
static_assert(!std::is_invocable_v<decltype(&SmoothedSlicedLoss),
                                   const EncodedMatrix&, const Matrix&,
                                   std::span<const Matrix>,
                                   const FDivGenerator&, const KernelConfig&,
                                   int>);

SliceBundle SmallBundle(std::size_t n, std::size_t k, std::size_t m,
                        std::uint64_t seed) {
  EncodedMatrix x;
  x.data = Matrix(n, 2);
  RandomStream s(seed, "points");
  for (std::size_t r = 0; r < n; ++r) {
    x.data(r, 0) = r % 2 == 0 ? 0.2 : 0.5;
    x.data(r, 1) = 0.3 + 0.03 * s.Normal();
  }
  return ApplyMechanism(x, {2, k, m}, 0.1, seed);
}

GeneratorModel SmallModel(std::uint64_t seed) {
  const std::size_t dims[] = {4, 16, 2};
  return InitGenerator(dims, seed);
}

TrainConfig SmallConfig() {
  TrainConfig cfg;
  cfg.batch_size = 32;
  cfg.max_steps = 12;
  cfg.adam.learning_rate = 1e-2;
  cfg.seed = 5;
  return cfg;
}

std::filesystem::path TempDir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() /
                   ("slicedp_trainer_test_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

TEST(TrainerTest, ZeroStepsReturnsInitialModel) {
  const SliceBundle bundle = SmallBundle(100, 1, 5, 1);
  TrainConfig cfg = SmallConfig();
  cfg.max_steps = 0;
  const TrainResult r = Train(bundle, SmallModel(2), cfg);
  EXPECT_EQ(r.model, SmallModel(2));
  EXPECT_TRUE(r.history.losses.empty());
  EXPECT_EQ(r.step, 0u);
}

TEST(TrainerTest, DeterministicGivenSeeds) {
  const SliceBundle bundle = SmallBundle(100, 1, 5, 1);
  const TrainResult a = Train(bundle, SmallModel(2), SmallConfig());
  const TrainResult b = Train(bundle, SmallModel(2), SmallConfig());
  ASSERT_EQ(a.history.losses.size(), 12u);
  EXPECT_EQ(a.history.losses, b.history.losses);
  EXPECT_EQ(a.model, b.model);
  TrainConfig other = SmallConfig();
  other.seed = 6;
  EXPECT_NE(Train(bundle, SmallModel(2), other).history.losses,
            a.history.losses);
}

TEST(TrainerTest, ResumeFromCheckpointIsBitExact) {
  const SliceBundle bundle = SmallBundle(90, 2, 3, 3);
  TrainConfig cfg = SmallConfig();
  cfg.max_steps = 20;
  cfg.checkpoint_interval = 7;
  cfg.checkpoint_dir = TempDir("resume");
  const TrainResult full = Train(bundle, SmallModel(4), cfg);
  ASSERT_EQ(full.history.checkpoints.size(), 2u);
  EXPECT_EQ(full.history.checkpoints[0], "checkpoint-7");

  const Checkpoint mid = LoadCheckpoint(cfg.checkpoint_dir / "checkpoint-7.bin");
  EXPECT_EQ(mid.trainer_step, 7u);
  TrainConfig resume_cfg = cfg;
  resume_cfg.checkpoint_interval = 0;
  const TrainResult resumed = Resume(bundle, mid, resume_cfg);
  EXPECT_EQ(resumed.step, 20u);
  EXPECT_EQ(resumed.model, full.model);
  EXPECT_EQ(resumed.optimizer, full.optimizer);
  EXPECT_EQ(resumed.history.losses,
            std::vector<double>(full.history.losses.begin() + 7,
                                full.history.losses.end()));
  std::filesystem::remove_all(cfg.checkpoint_dir);
}

TEST(TrainerTest, EpochsAndBatchClamping) {
  const SliceBundle bundle = SmallBundle(50, 1, 4, 1);
  EXPECT_EQ(StepsPerEpoch(50, 16), 3u);
  EXPECT_EQ(StepsPerEpoch(50, 64), 1u);
  TrainConfig cfg = SmallConfig();
  cfg.batch_size = 16;
  cfg.epochs = 2;
  const TrainResult r = Train(bundle, SmallModel(1), cfg);
  EXPECT_EQ(r.history.losses.size(), 6u);
  EXPECT_EQ(r.history.epoch_seconds.size(), 2u);
  cfg.batch_size = 500;
  cfg.epochs = 1;
  EXPECT_EQ(Train(bundle, SmallModel(1), cfg).history.losses.size(), 1u);
}

TEST(TrainerTest, OptionalSchedulesAndLosses) {
  const SliceBundle bundle = SmallBundle(80, 1, 6, 2);
  TrainConfig cfg = SmallConfig();
  cfg.noise = NoiseSchedule::kPerEpoch;
  cfg.slices_per_step = 2;
  const TrainResult a = Train(bundle, SmallModel(1), cfg);
  EXPECT_EQ(a.history.losses, Train(bundle, SmallModel(1), cfg).history.losses);
  cfg.loss = LossKind::kSlicedWasserstein;
  cfg.f = FDivGenerator(FDivKind::kJensenShannon);
  const TrainResult b = Train(bundle, SmallModel(1), cfg);
  for (double l : b.history.losses) EXPECT_TRUE(std::isfinite(l));
  EXPECT_THROW(Train(SmallBundle(80, 2, 3, 2), SmallModel(1), cfg), Error);
}

TEST(TrainerTest, LossDecreasesOnSmallFixture) {
  const SliceBundle bundle = SmallBundle(400, 1, 10, 8);
  TrainConfig cfg = SmallConfig();
  cfg.batch_size = 64;
  cfg.max_steps = 300;
  const TrainResult r = Train(bundle, SmallModel(3), cfg);
  double head = 0, tail = 0;
  for (int i = 0; i < 30; ++i) {
    head += r.history.losses[i];
    tail += r.history.losses[r.history.losses.size() - 1 - i];
  }
  EXPECT_LT(tail, 0.5 * head);
  const double before = EvaluateLoss(bundle, SmallModel(3), cfg, 99);
  const double after = EvaluateLoss(bundle, r.model, cfg, 99);
  EXPECT_LT(after, before);
}

TEST(TrainerTest, RejectsBadInputs) {
  const SliceBundle bundle = SmallBundle(60, 1, 3, 1);
  const std::size_t wide[] = {4, 8, 3};
  EXPECT_THROW(Train(bundle, InitGenerator(wide, 1), SmallConfig()), Error);
  TrainConfig cfg = SmallConfig();
  cfg.batch_size = 1;
  EXPECT_THROW(Train(bundle, SmallModel(1), cfg), Error);
  cfg = SmallConfig();
  cfg.adam.learning_rate = 0.0;
  EXPECT_THROW(Train(bundle, SmallModel(1), cfg), Error);

  SliceBundle broken = bundle;
  for (std::size_t r = 0; r < broken.noisy.rows(); ++r) {
    broken.noisy(r, 0) = std::nan("");
  }
  try {
    Train(broken, SmallModel(1), SmallConfig());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidArgument);
  }
}

TEST(TrainerTest, HistoryCsv) {
  TrainHistory h;
  h.steps = {0, 1};
  h.losses = {0.5, 0.25};
  std::ostringstream out;
  h.WriteCsv(out);
  EXPECT_EQ(out.str(), "step,loss\n0,0.5\n1,0.25\n");
}

TEST(GenerateTest, CountsSeedsAndWidth) {
  const ColumnSchema schema = ColumnSchema::Parse(
      "x,numerical,0,1\nc,categorical,a,b,c\n");
  const Encoding enc = Encoding::ForSchema(schema);
  const std::size_t dims[] = {3, 8, 4};
  const GeneratorModel model = InitGenerator(dims, 1);
  const Table empty = Generate(model, 0, enc, 1);
  EXPECT_EQ(empty.num_rows(), 0u);
  EXPECT_EQ(empty.columns.size(), 2u);
  const Table a = Generate(model, 50, enc, 7);
  EXPECT_EQ(a.num_rows(), 50u);
  EXPECT_EQ(a.columns, Generate(model, 50, enc, 7).columns);
  EXPECT_NE(a.columns, Generate(model, 50, enc, 8).columns);
  for (double v : a.columns[0]) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
  const std::size_t narrow[] = {3, 8, 2};
  EXPECT_THROW(Generate(InitGenerator(narrow, 1), 5, enc, 1), Error);
}

}  // namespace
}  // namespace slicedp
