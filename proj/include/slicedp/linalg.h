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

#ifndef SLICEDP_LINALG_H_
#define SLICEDP_LINALG_H_

#include <span>
#include <vector>

#include "slicedp/matrix.h"

namespace slicedp {

// Cholesky factorization A = L L^T of a symmetric positive-definite matrix
// (blocked, right-looking). Only the lower triangle of the input is read.
class CholeskyFactor {
 public:
  // Throws Error(kNumerical) when the matrix is not numerically positive
  // definite.
  explicit CholeskyFactor(Matrix spd);

  std::size_t size() const { return factor_.rows(); }
  // Lower-triangular factor L; the strict upper triangle is zero.
  const Matrix& lower() const { return factor_; }

  void SolveInPlace(std::span<double> rhs) const;
  std::vector<double> Solve(std::span<const double> rhs) const;

 private:
  Matrix factor_;
};

}  // namespace slicedp

#endif  // SLICEDP_LINALG_H_
