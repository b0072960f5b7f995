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

#include "slicedp/matrix.h"

#include <algorithm>

#include "slicedp/errors.h"
#include "slicedp/simd/kernels.h"

namespace slicedp {

void Matrix::Fill(double value) { std::fill(data_.begin(), data_.end(), value); }

Matrix Matrix::ColumnBlock(std::size_t first, std::size_t count) const {
  Require(first + count <= cols_, ErrorCode::kInvalidArgument,
          "ColumnBlock: range exceeds column count");
  Matrix out(rows_, count);
  for (std::size_t r = 0; r < rows_; ++r) {
    std::copy_n(data_.data() + r * cols_ + first, count, out.data() + r * count);
  }
  return out;
}

Matrix Matrix::GatherRows(std::span<const std::size_t> indices) const {
  Matrix out(indices.size(), cols_);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    Require(indices[i] < rows_, ErrorCode::kInvalidArgument,
            "GatherRows: index out of range");
    std::copy_n(data_.data() + indices[i] * cols_, cols_,
                out.data() + i * cols_);
  }
  return out;
}

Matrix Matrix::Transposed() const {
  Matrix out(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < cols_; ++c) out(c, r) = (*this)(r, c);
  }
  return out;
}

Matrix Multiply(const Matrix& a, const Matrix& b) {
  Require(a.cols() == b.rows(), ErrorCode::kInvalidArgument,
          "Multiply: inner dimensions differ");
  const auto& k = simd::Kernels();
  Matrix out(a.rows(), b.cols());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    double* dst = out.data() + r * out.cols();
    for (std::size_t i = 0; i < a.cols(); ++i) {
      const double scale = a(r, i);
      if (scale != 0.0) k.axpy(scale, b.data() + i * b.cols(), dst, b.cols());
    }
  }
  return out;
}

Matrix MultiplyTransposed(const Matrix& a, const Matrix& b) {
  Require(a.cols() == b.cols(), ErrorCode::kInvalidArgument,
          "MultiplyTransposed: inner dimensions differ");
  const auto& k = simd::Kernels();
  Matrix out(a.rows(), b.rows());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    for (std::size_t c = 0; c < b.rows(); ++c) {
      out(r, c) = k.dot(a.data() + r * a.cols(), b.data() + c * b.cols(),
                        a.cols());
    }
  }
  return out;
}

}  // namespace slicedp
