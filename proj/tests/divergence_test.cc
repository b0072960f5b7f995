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

#include "slicedp/divergence.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include "gtest/gtest.h"
#include "slicedp/errors.h"
#include "slicedp/rng.h"

namespace slicedp {
namespace {

Matrix NormalRows(std::size_t n, std::size_t dim, double mean, double sd,
                  std::uint64_t seed, std::string_view label = "pts") {
  RandomStream s(seed, label);
  Matrix m(n, dim);
  for (double& v : m.values()) v = mean + sd * s.Normal();
  return m;
}

TEST(FDivGeneratorTest, ValuesAndDerivatives) {
  for (FDivKind kind :
       {FDivKind::kKL, FDivKind::kChiSquared, FDivKind::kJensenShannon}) {
    const FDivGenerator f(kind);
    EXPECT_NEAR(f.f(1.0), 0.0, 1e-15) << f.name();
    for (double t : {0.05, 0.5, 1.0, 2.5, 7.0}) {
      const double h = 1e-6 * t;
      EXPECT_NEAR(f.f_prime(t), (f.f(t + h) - f.f(t - h)) / (2 * h), 1e-6)
          << f.name() << " t=" << t;
    }
    EXPECT_NEAR(f.f(1e-12), f.f_at_zero(), 1e-9) << f.name();
    EXPECT_NEAR(f.f_prime(1.0), 0.0, 1e-15) << f.name();
    for (double t = 0.0; t < 20.0; t += 0.01) EXPECT_GE(f.f(t), -1e-15);
    EXPECT_EQ(f.f(0.0), f.f_at_zero());
  }
  EXPECT_EQ(FDivGenerator(FDivKind::kJensenShannon).f_at_zero(),
            std::numbers::ln2);
  EXPECT_EQ(FDivGenerator::FromName("KL").kind(), FDivKind::kKL);
  EXPECT_EQ(FDivGenerator::FromName("chi2").kind(), FDivKind::kChiSquared);
  EXPECT_EQ(FDivGenerator::FromName("js").kind(), FDivKind::kJensenShannon);
  EXPECT_THROW(FDivGenerator::FromName("tv"), Error);
}

TEST(BandwidthTest, MedianPairwiseDistance) {
  Matrix odd(3, 1);
  odd(1, 0) = 1.0;
  odd(2, 0) = 3.0;  // distances 1, 3, 2
  EXPECT_DOUBLE_EQ(MedianBandwidth(PointSet::FromRows(odd)), 2.0);
  Matrix even(4, 1);
  even(1, 0) = 1.0;
  even(2, 0) = 2.0;
  even(3, 0) = 4.0;  // 1, 2, 4, 1, 3, 2 -> middle pair 2, 2
  EXPECT_DOUBLE_EQ(MedianBandwidth(PointSet::FromRows(even)), 2.0);
  Matrix planar(2, 2);
  planar(1, 0) = 3.0;
  planar(1, 1) = 4.0;
  EXPECT_DOUBLE_EQ(MedianBandwidth(PointSet::FromRows(planar)), 5.0);
  try {
    MedianBandwidth(PointSet::FromRows(Matrix(5, 2)));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNumerical);
  }
}

TEST(KernelTest, GaussianKernelByHand) {
  const double x[] = {0.0, 0.0};
  const double y[] = {1.0, 1.0};
  EXPECT_DOUBLE_EQ(GaussianKernel(x, y, 1.0), std::exp(-1.0));
  EXPECT_DOUBLE_EQ(GaussianKernel(x, x, 0.1), 1.0);
  EXPECT_THROW(GaussianKernel(x, y, 0.0), Error);
}

TEST(KernelConfigTest, Validation) {
  KernelConfig cfg;
  EXPECT_NO_THROW(cfg.Validate());
  cfg.ridge = 0.0;
  EXPECT_THROW(cfg.Validate(), Error);
  cfg = {};
  cfg.multipliers.clear();
  EXPECT_THROW(cfg.Validate(), Error);
  cfg = {};
  cfg.multipliers = {1.0, -2.0};
  EXPECT_THROW(cfg.Validate(), Error);
}

TEST(DensityRatioTest, MatchedSamplesGiveRatioNearOne) {
  const Matrix q = NormalRows(800, 1, 0.0, 1.0, 1, "q");
  const Matrix p = NormalRows(800, 1, 0.0, 1.0, 2, "p");
  const auto r = DensityRatio(PointSet::FromRows(q), PointSet::FromRows(p), {});
  double mean = 0;
  for (double v : r) {
    ASSERT_GE(v, 0.0);
    mean += v;
  }
  EXPECT_NEAR(mean / r.size(), 1.0, 0.05);
  EXPECT_LT(FDivergenceEstimate(r, FDivGenerator(FDivKind::kKL)), 0.03);
}

TEST(DensityRatioTest, ShiftedGaussiansKl) {
  // KL(N(0,1) || N(0.5,1)) = 0.125. The estimate is heavy-tailed across
  // draws, so compare the median.
  std::vector<double> estimates;
  for (int s = 0; s < 5; ++s) {
    const Matrix q = NormalRows(1500, 1, 0.5, 1.0, 10 + s, "q");
    const Matrix p = NormalRows(1500, 1, 0.0, 1.0, 10 + s, "p");
    const auto r =
        DensityRatio(PointSet::FromRows(q), PointSet::FromRows(p), {});
    estimates.push_back(FDivergenceEstimate(r, FDivGenerator(FDivKind::kKL)));
  }
  std::sort(estimates.begin(), estimates.end());
  EXPECT_GT(estimates[2], 0.06);
  EXPECT_LT(estimates[2], 0.25);
}

TEST(DensityRatioTest, UnequalSampleSizesAndDegenerateReal) {
  const Matrix q = NormalRows(300, 2, 0.0, 1.0, 3, "q");
  const Matrix p = NormalRows(100, 2, 0.0, 1.0, 4, "p");
  const auto r = DensityRatio(PointSet::FromRows(q), PointSet::FromRows(p), {});
  ASSERT_EQ(r.size(), 300u);
  double mean = 0;
  for (double v : r) mean += v;
  EXPECT_NEAR(mean / r.size(), 1.0, 0.15);
  // All real points equal: the bandwidth floor takes over.
  const auto flat = DensityRatio(PointSet::FromRows(Matrix(10, 2)),
                                 PointSet::FromRows(p), {});
  for (double v : flat) EXPECT_TRUE(std::isfinite(v));
  EXPECT_THROW(DensityRatio(PointSet::FromRows(q),
                            PointSet::FromRows(Matrix(5, 3)), {}),
               Error);
}

struct LossFixture {
  std::vector<Slice> slices;
  Matrix syn;
  std::vector<Matrix> noise;
};

LossFixture MakeLossFixture(std::size_t d, std::size_t k, std::size_t m,
                            std::size_t b, std::uint64_t seed) {
  LossFixture fx;
  for (std::size_t s = 0; s < m; ++s) {
    Slice slice;
    slice.theta = NormalRows(d, k, 0.0, 1.0 / std::sqrt(double(d)), seed + s, "theta");
    slice.proj = NormalRows(b, k, 0.2, 0.5, seed + s, "proj");
    fx.slices.push_back(slice);
    fx.noise.push_back(NormalRows(b, k, 0.0, 0.1, seed + s, "noise"));
  }
  fx.syn = NormalRows(b, d, 0.0, 0.6, seed, "syn");
  return fx;
}

void ExpectGradientMatchesFiniteDifferences(
    const LossFixture& fx,
    const std::function<LossAndGradient(const Matrix&)>& loss, double tol) {
  const LossAndGradient base = loss(fx.syn);
  double scale = 0;
  for (double g : base.grad_syn.values()) scale = std::max(scale, std::abs(g));
  ASSERT_GT(scale, 0.0);
  for (std::size_t i = 0; i < fx.syn.size(); ++i) {
    const double h = 1e-5;
    Matrix plus = fx.syn, minus = fx.syn;
    plus.values()[i] += h;
    minus.values()[i] -= h;
    const double fd = (loss(plus).loss - loss(minus).loss) / (2 * h);
    const double g = base.grad_syn.values()[i];
    EXPECT_NEAR(g, fd, tol * std::max(std::abs(fd), 0.05 * scale))
        << "entry " << i;
  }
}

TEST(SmoothedSlicedLossTest, GradientMatchesFiniteDifferences) {
  for (FDivKind kind :
       {FDivKind::kKL, FDivKind::kChiSquared, FDivKind::kJensenShannon}) {
    for (std::size_t k : {1, 2}) {
      const LossFixture fx = MakeLossFixture(3, k, 3, 24, 100 + k);
      const FDivGenerator f(kind);
      ExpectGradientMatchesFiniteDifferences(
          fx,
          [&](const Matrix& syn) {
            return SmoothedSlicedLoss(fx.slices, syn, fx.noise, f, {});
          },
          1e-3);
    }
  }
}

TEST(SmoothedSlicedLossTest, ThreadCountDoesNotChangeResult) {
  const LossFixture fx = MakeLossFixture(4, 1, 7, 40, 5);
  const FDivGenerator f;
  const LossAndGradient one = SmoothedSlicedLoss(fx.slices, fx.syn, fx.noise, f, {}, 1);
  const LossAndGradient many = SmoothedSlicedLoss(fx.slices, fx.syn, fx.noise, f, {}, 3);
  EXPECT_EQ(one.loss, many.loss);
  EXPECT_EQ(one.grad_syn, many.grad_syn);
}

TEST(SmoothedSlicedLossTest, MatchedDistributionsScoreLow) {
  LossFixture fx = MakeLossFixture(2, 1, 4, 300, 9);
  for (std::size_t s = 0; s < fx.slices.size(); ++s) {
    const Matrix real_x = NormalRows(300, 2, 0.0, 0.5, 50 + s, "real");
    fx.slices[s].proj = Multiply(real_x, fx.slices[s].theta);
    const Matrix real_noise = NormalRows(300, 1, 0.0, 0.1, 70 + s, "rn");
    for (std::size_t i = 0; i < 300; ++i) fx.slices[s].proj(i, 0) += real_noise(i, 0);
  }
  fx.syn = NormalRows(300, 2, 0.0, 0.5, 91, "syn2");
  const double matched =
      SmoothedSlicedLoss(fx.slices, fx.syn, fx.noise, FDivGenerator(), {}).loss;
  Matrix shifted = fx.syn;
  for (std::size_t i = 0; i < shifted.rows(); ++i) shifted(i, 0) += 2.0;
  const double apart =
      SmoothedSlicedLoss(fx.slices, shifted, fx.noise, FDivGenerator(), {}).loss;
  EXPECT_LT(matched, 0.05);
  EXPECT_GT(apart, 5 * matched);
}

TEST(SmoothedSlicedLossTest, RejectsMismatchedInputs) {
  const LossFixture fx = MakeLossFixture(3, 1, 2, 10, 1);
  std::vector<Matrix> short_noise(fx.noise.begin(), fx.noise.begin() + 1);
  EXPECT_THROW(
      SmoothedSlicedLoss(fx.slices, fx.syn, short_noise, FDivGenerator(), {}),
      Error);
  EXPECT_THROW(SmoothedSlicedLoss(fx.slices, Matrix(10, 4), fx.noise,
                                  FDivGenerator(), {}),
               Error);
}

TEST(SlicedWassersteinTest, ValueByHand) {
  Slice slice;
  slice.theta = Matrix(1, 1, 1.0);
  slice.proj = Matrix(3, 1);
  slice.proj(0, 0) = 3.0;
  slice.proj(1, 0) = 1.0;
  slice.proj(2, 0) = 2.0;
  Matrix syn(3, 1);
  syn(0, 0) = 0.0;
  syn(1, 0) = 5.0;
  syn(2, 0) = 2.5;
  const std::vector<Matrix> noise{Matrix(3, 1)};
  const std::vector<Slice> slices{slice};
  // sorted real 1, 2, 3 vs sorted syn 0, 2.5, 5: (1 + 0.25 + 4) / 3
  const LossAndGradient lg = SlicedWassersteinLoss(slices, syn, noise);
  EXPECT_NEAR(lg.loss, 5.25 / 3.0, 1e-15);
  EXPECT_NEAR(lg.grad_syn(0, 0), 2.0 * (0.0 - 1.0) / 3.0, 1e-15);
  EXPECT_NEAR(lg.grad_syn(1, 0), 2.0 * (5.0 - 3.0) / 3.0, 1e-15);
  EXPECT_NEAR(lg.grad_syn(2, 0), 2.0 * (2.5 - 2.0) / 3.0, 1e-15);
}

TEST(SlicedWassersteinTest, GradientMatchesFiniteDifferences) {
  const LossFixture fx = MakeLossFixture(4, 1, 5, 30, 21);
  ExpectGradientMatchesFiniteDifferences(
      fx,
      [&](const Matrix& syn) {
        return SlicedWassersteinLoss(fx.slices, syn, fx.noise);
      },
      1e-3);
  const LossFixture k2 = MakeLossFixture(4, 2, 2, 30, 21);
  EXPECT_THROW(SlicedWassersteinLoss(k2.slices, k2.syn, k2.noise), Error);
}

}  // namespace
}  // namespace slicedp
