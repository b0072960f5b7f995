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

#include "slicedp/linalg.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "slicedp/errors.h"
#include "slicedp/simd/kernels.h"

namespace slicedp {
namespace {

constexpr std::size_t kBlock = 96;

[[noreturn]] void NotPositiveDefinite(std::size_t minor) {
  Fail(ErrorCode::kNumerical,
       "Cholesky factorization failed (leading minor " +
           std::to_string(minor) +
           " not positive); increase the ridge for near-duplicate points");
}

}  // namespace

CholeskyFactor::CholeskyFactor(Matrix spd) : factor_(std::move(spd)) {
  Require(factor_.rows() == factor_.cols(), ErrorCode::kInvalidArgument,
          "Cholesky: matrix must be square");
  const std::size_t n = factor_.rows();
  const auto& kernels = simd::Kernels();
  double* a = factor_.data();

  for (std::size_t k0 = 0; k0 < n; k0 += kBlock) {
    const std::size_t k1 = std::min(n, k0 + kBlock);
    // Diagonal block, then the panel below it; rows already carry the
    // updates from earlier blocks.
    for (std::size_t j = k0; j < k1; ++j) {
      const double* lj = a + j * n + k0;
      const double s = a[j * n + j] - kernels.dot(lj, lj, j - k0);
      if (!(s > 0.0) || !std::isfinite(s)) NotPositiveDefinite(j + 1);
      const double ljj = std::sqrt(s);
      a[j * n + j] = ljj;
      const double inv = 1.0 / ljj;
      for (std::size_t i = j + 1; i < n; ++i) {
        double* li = a + i * n;
        li[j] = (li[j] - kernels.dot(li + k0, lj, j - k0)) * inv;
      }
    }
    // Trailing update A22 -= L21 L21^T, lower triangle by tiles.
    for (std::size_t i0 = k1; i0 < n; i0 += kBlock) {
      const std::size_t i1 = std::min(n, i0 + kBlock);
      for (std::size_t j0 = k1; j0 <= i0; j0 += kBlock) {
        const std::size_t j1 = std::min(n, j0 + kBlock);
        kernels.gemm_nt_sub(i1 - i0, j1 - j0, k1 - k0, a + i0 * n + k0, n,
                            a + j0 * n + k0, n, a + i0 * n + j0, n);
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::fill(a + i * n + i + 1, a + (i + 1) * n, 0.0);
  }
}

void CholeskyFactor::SolveInPlace(std::span<double> rhs) const {
  Require(rhs.size() == factor_.rows(), ErrorCode::kInvalidArgument,
          "Cholesky solve: right-hand side length mismatch");
  const std::size_t n = factor_.rows();
  const auto& kernels = simd::Kernels();
  const double* l = factor_.data();
  double* x = rhs.data();
  // L y = b
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = (x[i] - kernels.dot(l + i * n, x, i)) / l[i * n + i];
  }
  // L^T x = y, consuming rows of L from the bottom.
  for (std::size_t i = n; i-- > 0;) {
    x[i] /= l[i * n + i];
    kernels.axpy(-x[i], l + i * n, x, i);
  }
}

std::vector<double> CholeskyFactor::Solve(std::span<const double> rhs) const {
  std::vector<double> out(rhs.begin(), rhs.end());
  SolveInPlace(out);
  return out;
}

}  // namespace slicedp
