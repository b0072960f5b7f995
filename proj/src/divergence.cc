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
#include <cctype>
#include <cmath>
#include <numbers>
#include <numeric>
#include <optional>
#include <string>

#include "slicedp/errors.h"
#include "slicedp/linalg.h"
#include "slicedp/parallel.h"
#include "slicedp/simd/kernels.h"

namespace slicedp {
namespace {

std::string Lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

// One bandwidth of the ensemble on one (real, synthetic) pair.
struct EnsembleTerm {
  double bandwidth = 0.0;
  std::optional<CholeskyFactor> factor;
  Matrix cross;           // K(real_i, syn_j), nq x np
  std::vector<double> u;  // unclipped ratio
};

struct RatioWork {
  std::vector<EnsembleTerm> terms;
  std::vector<double> ratio;  // ensemble mean of clipped u
};

double BaseBandwidth(const PointSet& real, const KernelConfig& cfg) {
  try {
    return MedianBandwidth(real);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kNumerical) throw;
    return cfg.bandwidth_floor;
  }
}

RatioWork ComputeRatio(const PointSet& real, const PointSet& syn,
                       const KernelConfig& cfg) {
  const std::size_t nq = real.size();
  const std::size_t np = syn.size();
  const std::size_t dim = real.dim();
  const auto& kernels = simd::Kernels();
  const double size_ratio = static_cast<double>(nq) / static_cast<double>(np);
  const double base = BaseBandwidth(real, cfg);

  RatioWork work;
  work.ratio.assign(nq, 0.0);
  std::vector<double> point(dim);
  for (double multiplier : cfg.multipliers) {
    EnsembleTerm term;
    term.bandwidth = base * multiplier;
    const double scale = -0.5 / (term.bandwidth * term.bandwidth);

    Matrix gram(nq, nq);
    for (std::size_t i = 0; i < nq; ++i) {
      for (std::size_t c = 0; c < dim; ++c) point[c] = real.at(i, c);
      kernels.gaussian_row(real.coords(), nq, dim, point.data(), scale,
                           gram.data() + i * nq);
      gram(i, i) += cfg.ridge;
    }
    term.factor.emplace(std::move(gram));

    term.cross = Matrix(nq, np);
    term.u.resize(nq);
    for (std::size_t i = 0; i < nq; ++i) {
      for (std::size_t c = 0; c < dim; ++c) point[c] = real.at(i, c);
      term.u[i] = kernels.gaussian_row(syn.coords(), np, dim, point.data(),
                                       scale, term.cross.data() + i * np);
    }
    term.factor->SolveInPlace(term.u);
    for (std::size_t i = 0; i < nq; ++i) {
      term.u[i] *= size_ratio;
      work.ratio[i] += std::max(term.u[i], 0.0);
    }
    work.terms.push_back(std::move(term));
  }
  const double inv_terms = 1.0 / static_cast<double>(cfg.multipliers.size());
  for (double& r : work.ratio) r *= inv_terms;
  return work;
}

void CheckPointSets(const PointSet& real, const PointSet& syn) {
  Require(real.size() > 0 && syn.size() > 0, ErrorCode::kInvalidArgument,
          "density ratio: empty sample set");
  Require(real.dim() == syn.dim(), ErrorCode::kInvalidArgument,
          "density ratio: dimension mismatch");
}

// Synthetic projections on one slice: syn_batch * theta + noise.
PointSet ProjectSynthetic(const Matrix& syn_batch, const Matrix& theta,
                          const Matrix& noise) {
  const std::size_t b = syn_batch.rows();
  const std::size_t k = theta.cols();
  const auto& kernels = simd::Kernels();
  const Matrix theta_t = theta.Transposed();
  PointSet out(b, k);
  for (std::size_t j = 0; j < b; ++j) {
    for (std::size_t c = 0; c < k; ++c) {
      out.at(j, c) = kernels.dot(syn_batch.data() + j * syn_batch.cols(),
                                 theta_t.data() + c * theta_t.cols(),
                                 syn_batch.cols()) +
                     noise(j, c);
    }
  }
  return out;
}

void CheckSliceInputs(std::span<const Slice> slices, const Matrix& syn_batch,
                      std::span<const Matrix> syn_noise) {
  Require(!slices.empty(), ErrorCode::kInvalidArgument, "loss: no slices");
  Require(syn_noise.size() == slices.size(), ErrorCode::kInvalidArgument,
          "loss: need one synthetic noise block per slice");
  for (std::size_t s = 0; s < slices.size(); ++s) {
    const Slice& slice = slices[s];
    Require(slice.theta.rows() == syn_batch.cols(),
            ErrorCode::kInvalidArgument,
            "loss: slice directions do not match synthetic dimension");
    Require(slice.proj.cols() == slice.theta.cols(),
            ErrorCode::kInvalidArgument,
            "loss: projection width differs from slice dimension");
    Require(slice.proj.rows() > 0, ErrorCode::kInvalidArgument,
            "loss: empty real batch");
    Require(syn_noise[s].rows() == syn_batch.rows() &&
                syn_noise[s].cols() == slice.theta.cols(),
            ErrorCode::kInvalidArgument, "loss: noise block has wrong shape");
  }
}

// grad_syn += scale * dy * theta^T, with dy of shape b x k.
void ChainThroughProjection(const Matrix& dy, const Matrix& theta,
                            double scale, Matrix& grad_syn) {
  const auto& kernels = simd::Kernels();
  const Matrix theta_t = theta.Transposed();
  for (std::size_t j = 0; j < dy.rows(); ++j) {
    for (std::size_t c = 0; c < dy.cols(); ++c) {
      const double g = scale * dy(j, c);
      if (g != 0.0) {
        kernels.axpy(g, theta_t.data() + c * theta_t.cols(),
                     grad_syn.data() + j * grad_syn.cols(), grad_syn.cols());
      }
    }
  }
}

struct SliceResult {
  double loss = 0.0;
  Matrix dy;  // dLoss_s / dy, b x k
};

SliceResult SmoothedSlice(const Slice& slice, const Matrix& syn_batch,
                          const Matrix& noise, const FDivGenerator& f,
                          const KernelConfig& cfg) {
  const PointSet real = PointSet::FromRows(slice.proj);
  const PointSet syn = ProjectSynthetic(syn_batch, slice.theta, noise);
  const std::size_t nq = real.size();
  const std::size_t np = syn.size();
  const std::size_t k = real.dim();
  RatioWork work = ComputeRatio(real, syn, cfg);

  SliceResult result;
  result.loss = FDivergenceEstimate(work.ratio, f);
  result.dy = Matrix(np, k);

  // dL/dr_i = f'(r_i) / nq on the support, zero where the ratio is clipped.
  std::vector<double> d_ratio(nq, 0.0);
  for (std::size_t i = 0; i < nq; ++i) {
    if (work.ratio[i] > 0.0) {
      d_ratio[i] = f.f_prime(work.ratio[i]) / static_cast<double>(nq);
    }
  }
  const double size_ratio = static_cast<double>(nq) / static_cast<double>(np);
  const double term_weight =
      size_ratio / static_cast<double>(work.terms.size());
  const auto& kernels = simd::Kernels();
  std::vector<double> w(nq);
  std::vector<double> weight_sum(np);
  std::vector<double> weighted_coords(np * k);
  for (const EnsembleTerm& term : work.terms) {
    for (std::size_t i = 0; i < nq; ++i) {
      w[i] = term.u[i] > 0.0 ? d_ratio[i] * term_weight : 0.0;
    }
    // dL/dc = A^T dL/du with A = (K + tau I)^{-1} symmetric.
    term.factor->SolveInPlace(w);
    std::fill(weight_sum.begin(), weight_sum.end(), 0.0);
    std::fill(weighted_coords.begin(), weighted_coords.end(), 0.0);
    for (std::size_t i = 0; i < nq; ++i) {
      const double* row = term.cross.data() + i * np;
      kernels.axpy(w[i], row, weight_sum.data(), np);
      for (std::size_t c = 0; c < k; ++c) {
        kernels.axpy(w[i] * real.at(i, c), row,
                     weighted_coords.data() + c * np, np);
      }
    }
    // d c_i / d y_j = K_ij (q_i - y_j) / bw^2.
    const double inv_bw2 = 1.0 / (term.bandwidth * term.bandwidth);
    for (std::size_t j = 0; j < np; ++j) {
      for (std::size_t c = 0; c < k; ++c) {
        result.dy(j, c) += inv_bw2 * (weighted_coords[c * np + j] -
                                      syn.at(j, c) * weight_sum[j]);
      }
    }
  }
  return result;
}

}  // namespace

std::string_view FDivGenerator::name() const {
  switch (kind_) {
    case FDivKind::kKL:
      return "kl";
    case FDivKind::kChiSquared:
      return "chi2";
    case FDivKind::kJensenShannon:
      return "js";
  }
  return "unknown";
}

double FDivGenerator::f(double t) const {
  if (t <= 0.0) return f_at_zero();
  switch (kind_) {
    case FDivKind::kKL:
      return t * std::log(t) - t + 1.0;
    case FDivKind::kChiSquared:
      return (t - 1.0) * (t - 1.0);
    case FDivKind::kJensenShannon:
      return t * std::log(t) - (t + 1.0) * std::log((t + 1.0) / 2.0);
  }
  return 0.0;
}

double FDivGenerator::f_prime(double t) const {
  switch (kind_) {
    case FDivKind::kKL:
      return std::log(t);
    case FDivKind::kChiSquared:
      return 2.0 * (t - 1.0);
    case FDivKind::kJensenShannon:
      return std::log(2.0 * t / (t + 1.0));
  }
  return 0.0;
}

double FDivGenerator::f_at_zero() const {
  switch (kind_) {
    case FDivKind::kKL:
      return 1.0;
    case FDivKind::kChiSquared:
      return 1.0;
    case FDivKind::kJensenShannon:
      return std::numbers::ln2;
  }
  return 0.0;
}

FDivGenerator FDivGenerator::FromName(std::string_view name) {
  const std::string lowered = Lower(name);
  if (lowered == "kl") return FDivGenerator(FDivKind::kKL);
  if (lowered == "chi2" || lowered == "chisquared") {
    return FDivGenerator(FDivKind::kChiSquared);
  }
  if (lowered == "js" || lowered == "jensenshannon") {
    return FDivGenerator(FDivKind::kJensenShannon);
  }
  Fail(ErrorCode::kInvalidArgument,
       "unknown f-divergence '" + std::string(name) + "' (kl, chi2, js)");
}

void KernelConfig::Validate() const {
  Require(!multipliers.empty(), ErrorCode::kInvalidArgument,
          "kernel config: at least one bandwidth multiplier required");
  for (double m : multipliers) {
    Require(m > 0.0 && std::isfinite(m), ErrorCode::kInvalidArgument,
            "kernel config: multipliers must be positive");
  }
  Require(ridge > 0.0 && std::isfinite(ridge), ErrorCode::kInvalidArgument,
          "kernel config: ridge must be positive");
  Require(bandwidth_floor > 0.0, ErrorCode::kInvalidArgument,
          "kernel config: bandwidth floor must be positive");
}

PointSet PointSet::FromRows(const Matrix& rows) {
  PointSet out(rows.rows(), rows.cols());
  for (std::size_t i = 0; i < rows.rows(); ++i) {
    for (std::size_t c = 0; c < rows.cols(); ++c) out.at(i, c) = rows(i, c);
  }
  return out;
}

std::vector<double> PointSet::Point(std::size_t i) const {
  std::vector<double> p(dim_);
  for (std::size_t c = 0; c < dim_; ++c) p[c] = at(i, c);
  return p;
}

double GaussianKernel(std::span<const double> x, std::span<const double> y,
                      double bw) {
  Require(x.size() == y.size(), ErrorCode::kInvalidArgument,
          "kernel: dimension mismatch");
  Require(bw > 0.0, ErrorCode::kInvalidArgument,
          "kernel: bandwidth must be positive");
  double sq = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double diff = x[i] - y[i];
    sq += diff * diff;
  }
  return std::exp(-sq / (2.0 * bw * bw));
}

double MedianBandwidth(const PointSet& points) {
  const std::size_t n = points.size();
  Require(n >= 2, ErrorCode::kInvalidArgument,
          "median bandwidth: need at least two points");
  const auto& kernels = simd::Kernels();
  std::vector<double> pairs;
  pairs.reserve(n * (n - 1) / 2);
  std::vector<double> row(n);
  std::vector<double> point(points.dim());
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (std::size_t c = 0; c < points.dim(); ++c) point[c] = points.at(i, c);
    kernels.squared_distances(points.coords(), n, points.dim(), point.data(),
                              row.data());
    pairs.insert(pairs.end(), row.begin() + static_cast<std::ptrdiff_t>(i + 1),
                 row.end());
  }
  const std::size_t count = pairs.size();
  const std::size_t mid = count / 2;
  std::nth_element(pairs.begin(), pairs.begin() + static_cast<std::ptrdiff_t>(mid),
                   pairs.end());
  double median = std::sqrt(pairs[mid]);
  if (count % 2 == 0) {
    const double below = *std::max_element(
        pairs.begin(), pairs.begin() + static_cast<std::ptrdiff_t>(mid));
    median = 0.5 * (median + std::sqrt(below));
  }
  if (!(median > 0.0)) {
    Fail(ErrorCode::kNumerical,
         "median bandwidth is zero: points are (mostly) identical");
  }
  return median;
}

std::vector<double> DensityRatio(const PointSet& real, const PointSet& syn,
                                 const KernelConfig& cfg) {
  cfg.Validate();
  CheckPointSets(real, syn);
  return ComputeRatio(real, syn, cfg).ratio;
}

double FDivergenceEstimate(std::span<const double> ratio,
                           const FDivGenerator& f) {
  if (ratio.empty()) return 0.0;
  double total = 0.0;
  for (double r : ratio) total += r > 0.0 ? f.f(r) : f.f_at_zero();
  return total / static_cast<double>(ratio.size());
}

LossAndGradient SmoothedSlicedLoss(std::span<const Slice> slices,
                                   const Matrix& syn_batch,
                                   std::span<const Matrix> syn_noise,
                                   const FDivGenerator& f,
                                   const KernelConfig& cfg, int threads) {
  cfg.Validate();
  CheckSliceInputs(slices, syn_batch, syn_noise);
  std::vector<SliceResult> per_slice(slices.size());
  ParallelFor(slices.size(), threads, [&](std::size_t s) {
    per_slice[s] = SmoothedSlice(slices[s], syn_batch, syn_noise[s], f, cfg);
  });

  // Ordered reduction keeps the result independent of the thread count.
  const double inv_m = 1.0 / static_cast<double>(slices.size());
  LossAndGradient out;
  out.grad_syn = Matrix(syn_batch.rows(), syn_batch.cols());
  for (std::size_t s = 0; s < slices.size(); ++s) {
    out.loss += per_slice[s].loss;
    ChainThroughProjection(per_slice[s].dy, slices[s].theta, inv_m,
                           out.grad_syn);
  }
  out.loss *= inv_m;
  return out;
}

LossAndGradient SlicedWassersteinLoss(std::span<const Slice> slices,
                                      const Matrix& syn_batch,
                                      std::span<const Matrix> syn_noise) {
  CheckSliceInputs(slices, syn_batch, syn_noise);
  const std::size_t b = syn_batch.rows();
  const double inv_m = 1.0 / static_cast<double>(slices.size());
  const double inv_b = 1.0 / static_cast<double>(b);
  LossAndGradient out;
  out.grad_syn = Matrix(b, syn_batch.cols());
  std::vector<std::size_t> real_order(b);
  std::vector<std::size_t> syn_order(b);
  for (std::size_t s = 0; s < slices.size(); ++s) {
    const Slice& slice = slices[s];
    Require(slice.theta.cols() == 1, ErrorCode::kInvalidArgument,
            "sliced Wasserstein loss requires k = 1 slices");
    Require(slice.proj.rows() == b, ErrorCode::kInvalidArgument,
            "sliced Wasserstein loss requires equal batch sizes");
    const PointSet syn = ProjectSynthetic(syn_batch, slice.theta, syn_noise[s]);
    std::iota(real_order.begin(), real_order.end(), 0);
    std::iota(syn_order.begin(), syn_order.end(), 0);
    std::stable_sort(real_order.begin(), real_order.end(),
                     [&](std::size_t a, std::size_t c) {
                       return slice.proj(a, 0) < slice.proj(c, 0);
                     });
    std::stable_sort(syn_order.begin(), syn_order.end(),
                     [&](std::size_t a, std::size_t c) {
                       return syn.at(a, 0) < syn.at(c, 0);
                     });
    Matrix dy(b, 1);
    double slice_loss = 0.0;
    for (std::size_t i = 0; i < b; ++i) {
      const double diff = syn.at(syn_order[i], 0) - slice.proj(real_order[i], 0);
      slice_loss += diff * diff;
      dy(syn_order[i], 0) = 2.0 * diff * inv_b;
    }
    out.loss += slice_loss * inv_b;
    ChainThroughProjection(dy, slice.theta, inv_m, out.grad_syn);
  }
  out.loss *= inv_m;
  return out;
}

}  // namespace slicedp
