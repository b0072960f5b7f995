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

// Kernel mean-matching density-ratio estimation and the losses built on it.
//
// For samples p_1..p_b ~ P and q_1..q_b ~ Q, the ratio dP/dQ at the Q samples
// is estimated as
//
//   r = ((K_qq + tau I)^{-1} K_qp 1)_+
//
// with Gaussian Gram matrices, averaged over an ensemble of bandwidths that
// are multiples of the median pairwise distance of the Q samples. The
// f-divergence estimate is mean_i f(r_i).

#ifndef SLICEDP_DIVERGENCE_H_
#define SLICEDP_DIVERGENCE_H_

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "slicedp/matrix.h"
#include "slicedp/mechanism.h"

namespace slicedp {

enum class FDivKind { kKL, kChiSquared, kJensenShannon };

// Convex generator f on [0, inf) with f(1) = 0 and f'(1) = 0, so f >= 0:
//   kl    t ln t - t + 1
//   chi2  (t - 1)^2
//   js    t ln t - (t + 1) ln((t + 1) / 2)
class FDivGenerator {
 public:
  explicit FDivGenerator(FDivKind kind = FDivKind::kKL) : kind_(kind) {}

  FDivKind kind() const { return kind_; }
  std::string_view name() const;
  // f(t) for t >= 0; f(0) is the right limit.
  double f(double t) const;
  // f'(t) for t > 0.
  double f_prime(double t) const;
  double f_at_zero() const;

  // Accepts "kl", "chi2"/"chisquared", "js"/"jensenshannon".
  static FDivGenerator FromName(std::string_view name);

 private:
  FDivKind kind_;
};

struct KernelConfig {
  std::vector<double> multipliers{0.5, 1.0, 2.0};
  double ridge = 0.1;
  // Used in place of the median heuristic when all points coincide.
  double bandwidth_floor = 1e-3;

  void Validate() const;
};

// Coordinate-major point storage: coords[c * n + i] is coordinate c of
// point i. This is the layout the SIMD kernels consume.
class PointSet {
 public:
  PointSet() = default;
  PointSet(std::size_t n, std::size_t dim) : n_(n), dim_(dim), coords_(n * dim) {}
  static PointSet FromRows(const Matrix& rows);

  std::size_t size() const { return n_; }
  std::size_t dim() const { return dim_; }
  double& at(std::size_t i, std::size_t c) { return coords_[c * n_ + i]; }
  double at(std::size_t i, std::size_t c) const { return coords_[c * n_ + i]; }
  const double* coords() const { return coords_.data(); }
  std::vector<double> Point(std::size_t i) const;

 private:
  std::size_t n_ = 0;
  std::size_t dim_ = 0;
  std::vector<double> coords_;
};

// exp(-||x - y||^2 / (2 bw^2)).
double GaussianKernel(std::span<const double> x, std::span<const double> y,
                      double bw);

// Median of pairwise Euclidean distances over distinct index pairs. Throws
// Error(kNumerical) when the median is zero (degenerate point set).
double MedianBandwidth(const PointSet& points);

// Ratio dP/dQ at the Q samples (`real`), from P samples (`syn`), averaged
// over the bandwidth ensemble after clipping at zero. Scaled by n_q / n_p.
std::vector<double> DensityRatio(const PointSet& real, const PointSet& syn,
                                 const KernelConfig& cfg);

// mean_i f(r_i), with f_at_zero for zero entries.
double FDivergenceEstimate(std::span<const double> ratio,
                           const FDivGenerator& f);

struct LossAndGradient {
  double loss = 0.0;
  Matrix grad_syn;  // same shape as the synthetic batch
};

// Smoothed-sliced f-divergence between the synthetic batch and the real
// noisy projections:
//
//   L = (1/m) sum_s (1/b) sum_i f(r_s,i),
//
// where r_s is DensityRatio on slice s with Q = real projections
// slices[s].proj and P = synthetic projections x_j theta_s + syn_noise[s]_j.
// grad_syn is the exact gradient of L with respect to the synthetic batch;
// clipped ratio entries contribute zero. Bandwidths are set from the real
// projections only, so they do not depend on the synthetic batch.
LossAndGradient SmoothedSlicedLoss(std::span<const Slice> slices,
                                   const Matrix& syn_batch,
                                   std::span<const Matrix> syn_noise,
                                   const FDivGenerator& f,
                                   const KernelConfig& cfg, int threads = 1);

// 1-D sliced squared Wasserstein distance, k = 1 only:
//
//   L = (1/m) sum_s (1/b) sum_i (o_(i),s - y_(i),s)^2
//
// with order statistics of the real and synthetic projections.
LossAndGradient SlicedWassersteinLoss(std::span<const Slice> slices,
                                      const Matrix& syn_batch,
                                      std::span<const Matrix> syn_noise);

}  // namespace slicedp

#endif  // SLICEDP_DIVERGENCE_H_
