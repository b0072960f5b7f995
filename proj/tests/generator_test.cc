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

#include "slicedp/generator.h"

#include <cmath>
#include <sstream>
#include <vector>

#include "gtest/gtest.h"
#include "slicedp/errors.h"
#include "slicedp/rng.h"

namespace slicedp {
namespace {

Matrix Gaussian(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  Matrix m(rows, cols);
  RandomStream s(seed, "gen-test");
  s.FillNormal(m.values(), 1.0);
  return m;
}

double Objective(const GeneratorModel& model, const Matrix& z,
                 const Matrix& weights) {
  const Matrix out = Sample(model, z);
  double total = 0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    total += out.values()[i] * weights.values()[i];
  }
  return total;
}

TEST(GeneratorTest, HeInitializationStatistics) {
  const std::size_t dims[] = {16, 400, 300, 5};
  const GeneratorModel model = InitGenerator(dims, 1);
  EXPECT_EQ(model.num_layers(), 3u);
  EXPECT_EQ(model.latent_dim(), 16u);
  EXPECT_EQ(model.output_dim(), 5u);
  EXPECT_EQ(model.params().Count(), 16u * 400 + 400 + 400 * 300 + 300 + 300 * 5 + 5);
  for (std::size_t l = 0; l < 3; ++l) {
    const Matrix& w = model.params().weights[l];
    double m2 = 0;
    for (double v : w.values()) m2 += v * v;
    m2 /= w.size();
    const double expected = 2.0 / dims[l];
    EXPECT_NEAR(m2, expected, 6 * expected * std::sqrt(2.0 / w.size()))
        << "layer " << l;
    for (double b : model.params().biases[l]) EXPECT_EQ(b, 0.0);
  }
  EXPECT_EQ(model, InitGenerator(dims, 1));
  EXPECT_FALSE(model == InitGenerator(dims, 2));
  InitOptions zero;
  zero.zero = true;
  const GeneratorModel zeroed = InitGenerator(dims, 1, zero);
  for (double v : zeroed.params().weights[1].values()) {
    EXPECT_EQ(v, 0.0);
  }
}

TEST(GeneratorTest, DomainInitCentersOutput) {
  const std::size_t dims[] = {4, 16, 9};
  const InitOptions opts = DomainInit(9);
  EXPECT_DOUBLE_EQ(opts.output_bias, 0.5 / 3.0);
  const GeneratorModel plain = InitGenerator(dims, 3);
  const GeneratorModel centered = InitGenerator(dims, 3, opts);
  EXPECT_EQ(plain.params().weights[0], centered.params().weights[0]);
  const auto& w0 = plain.params().weights[1].values();
  const auto& w1 = centered.params().weights[1].values();
  for (std::size_t i = 0; i < w0.size(); ++i) {
    EXPECT_DOUBLE_EQ(w1[i], w0[i] * opts.output_gain);
  }
  for (double b : centered.params().biases[1]) EXPECT_EQ(b, 0.5 / 3.0);
  EXPECT_THROW(DomainInit(0), Error);
}

TEST(GeneratorTest, ForwardByHand) {
  // 2 -> 2 -> 1 with slope 0.5.
  Parameters p;
  Matrix w0(2, 2);
  w0(0, 0) = 1.0;
  w0(0, 1) = -1.0;
  w0(1, 0) = 2.0;
  w0(1, 1) = 0.5;
  Matrix w1(1, 2);
  w1(0, 0) = 3.0;
  w1(0, 1) = -2.0;
  p.weights = {w0, w1};
  p.biases = {{0.5, -1.0}, {0.25}};
  const GeneratorModel model({2, 2, 1}, p, 0.5);
  Matrix z(1, 2);
  z(0, 0) = 1.0;
  z(0, 1) = 3.0;
  // pre0 = (1 - 3 + 0.5, 2 + 1.5 - 1) = (-1.5, 2.5) -> (-0.75, 2.5)
  // out = 3 * -0.75 - 2 * 2.5 + 0.25 = -7
  const ForwardResult r = Forward(model, z);
  EXPECT_DOUBLE_EQ(r.output(0, 0), -7.0);
  EXPECT_DOUBLE_EQ(r.tape.pre[0](0, 0), -1.5);
  EXPECT_DOUBLE_EQ(r.tape.inputs[1](0, 0), -0.75);
  EXPECT_THROW(Forward(model, Matrix(1, 3)), Error);
  EXPECT_THROW(GeneratorModel({2, 3, 1}, p, 0.5), Error);
}

TEST(GeneratorTest, BackwardMatchesFiniteDifferences) {
  const std::size_t dims[] = {3, 6, 5, 2};
  GeneratorModel model = InitGenerator(dims, 7);
  // Non-zero biases so every parameter matters.
  for (auto& b : model.mutable_params().biases) {
    for (std::size_t i = 0; i < b.size(); ++i) b[i] = 0.1 * (i % 3) - 0.1;
  }
  const Matrix z = Gaussian(9, 3, 8);
  const Matrix weights = Gaussian(9, 2, 9);
  const ForwardResult fwd = Forward(model, z);
  const Parameters grad = Backward(model, fwd.tape, weights);

  auto check = [&](double& param, double analytic, const char* what) {
    const double saved = param;
    const double h = 1e-6 * std::max(1.0, std::abs(saved));
    param = saved + h;
    const double up = Objective(model, z, weights);
    param = saved - h;
    const double down = Objective(model, z, weights);
    param = saved;
    const double fd = (up - down) / (2 * h);
    EXPECT_NEAR(analytic, fd, 1e-4 * std::max(1.0, std::abs(fd))) << what;
  };
  Parameters& p = model.mutable_params();
  for (std::size_t l = 0; l < p.weights.size(); ++l) {
    for (std::size_t i = 0; i < p.weights[l].size(); ++i) {
      check(p.weights[l].values()[i], grad.weights[l].values()[i], "weight");
    }
    for (std::size_t i = 0; i < p.biases[l].size(); ++i) {
      check(p.biases[l][i], grad.biases[l][i], "bias");
    }
  }
}

TEST(GeneratorTest, StaleOrForeignTapeRejected) {
  const std::size_t dims[] = {2, 4, 2};
  GeneratorModel model = InitGenerator(dims, 1);
  const GeneratorModel other = InitGenerator(dims, 1);
  const Matrix z = Gaussian(3, 2, 1);
  const ForwardResult fwd = Forward(model, z);
  const Matrix g(3, 2, 1.0);
  EXPECT_NO_THROW(Backward(model, fwd.tape, g));
  EXPECT_THROW(Backward(other, fwd.tape, g), Error);
  EXPECT_THROW(Backward(model, fwd.tape, Matrix(3, 3)), Error);
  model.mutable_params();
  EXPECT_THROW(Backward(model, fwd.tape, g), Error);
}

TEST(AdamTest, FirstStepByHand) {
  const std::size_t dims[] = {1, 1};
  GeneratorModel model = InitGenerator(dims, 3);
  const double w0 = model.params().weights[0](0, 0);
  OptimizerState state = OptimizerState::For(model, {0.01, 0.9, 0.999, 1e-8});
  Parameters grad = Parameters::ZerosLike(model.params());
  grad.weights[0](0, 0) = 4.0;
  grad.biases[0][0] = -0.5;
  AdamStep(model, state, grad);
  // bias-corrected m = g, v = g^2 -> step lr * g / (|g| + eps)
  EXPECT_NEAR(model.params().weights[0](0, 0), w0 - 0.01 * 4.0 / (4.0 + 1e-8), 1e-15);
  EXPECT_NEAR(model.params().biases[0][0], 0.01 * 0.5 / (0.5 + 1e-8), 1e-15);
  EXPECT_EQ(state.step, 1u);
  EXPECT_NEAR(state.first_moment.weights[0](0, 0), 0.4, 1e-15);
  EXPECT_NEAR(state.second_moment.weights[0](0, 0), 0.016, 1e-15);
  EXPECT_THROW(OptimizerState::For(model, {0.0, 0.9, 0.999, 1e-8}), Error);
}

TEST(AdamTest, FitsLinearTarget) {
  // y = 2 z0 - z1 + 0.5 with a linear (single-layer) generator.
  const std::size_t dims[] = {2, 1};
  GeneratorModel model = InitGenerator(dims, 4);
  OptimizerState state = OptimizerState::For(model, {0.05, 0.9, 0.999, 1e-8});
  const Matrix z = Gaussian(64, 2, 5);
  Matrix target(64, 1);
  for (std::size_t i = 0; i < 64; ++i) target(i, 0) = 2 * z(i, 0) - z(i, 1) + 0.5;
  for (int it = 0; it < 2000; ++it) {
    const ForwardResult fwd = Forward(model, z);
    Matrix g(64, 1);
    for (std::size_t i = 0; i < 64; ++i) {
      g(i, 0) = 2 * (fwd.output(i, 0) - target(i, 0)) / 64;
    }
    AdamStep(model, state, Backward(model, fwd.tape, g));
  }
  EXPECT_NEAR(model.params().weights[0](0, 0), 2.0, 1e-3);
  EXPECT_NEAR(model.params().weights[0](0, 1), -1.0, 1e-3);
  EXPECT_NEAR(model.params().biases[0][0], 0.5, 1e-3);
}

TEST(CheckpointTest, RoundTripIsExact) {
  const std::size_t dims[] = {4, 8, 3};
  GeneratorModel model = InitGenerator(dims, 11, {0.1, false});
  OptimizerState state = OptimizerState::For(model, {1e-3, 0.8, 0.99, 1e-7});
  const Matrix z = Gaussian(5, 4, 1);
  const ForwardResult fwd = Forward(model, z);
  AdamStep(model, state, Backward(model, fwd.tape, Gaussian(5, 3, 2)));

  for (bool with_optimizer : {false, true}) {
    Checkpoint cp{model, std::nullopt, 17};
    if (with_optimizer) cp.optimizer = state;
    std::stringstream buffer;
    WriteCheckpoint(buffer, cp);
    const std::string bytes = buffer.str();
    EXPECT_EQ(bytes.substr(0, 8), "SLDPGENR");
    std::istringstream in(bytes);
    const Checkpoint back = ReadCheckpoint(in);
    EXPECT_EQ(back.model, model);
    EXPECT_EQ(back.model.leaky_slope(), 0.1);
    EXPECT_EQ(back.trainer_step, 17u);
    EXPECT_EQ(back.optimizer.has_value(), with_optimizer);
    if (with_optimizer) EXPECT_EQ(*back.optimizer, state);
    std::stringstream again;
    WriteCheckpoint(again, back);
    EXPECT_EQ(again.str(), bytes);

    std::istringstream truncated(bytes.substr(0, bytes.size() - 1));
    EXPECT_THROW(ReadCheckpoint(truncated), Error);
    std::string bad = bytes;
    bad[3] = '?';
    std::istringstream bad_in(bad);
    EXPECT_THROW(ReadCheckpoint(bad_in), Error);
  }
}

}  // namespace
}  // namespace slicedp
