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

#include <cmath>

#include "slicedp/simd/kernels.h"

namespace slicedp::simd {
namespace {

double Dot(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void Axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

double Sum(const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i];
  return acc;
}

void GemmNtSub(std::size_t rows, std::size_t cols, std::size_t depth,
               const double* a, std::size_t lda, const double* b,
               std::size_t ldb, double* c, std::size_t ldc) {
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      c[i * ldc + j] -= Dot(a + i * lda, b + j * ldb, depth);
    }
  }
}

void SquaredDistances(const double* coords, std::size_t n, std::size_t dim,
                      const double* point, double* out) {
  for (std::size_t j = 0; j < n; ++j) out[j] = 0.0;
  for (std::size_t c = 0; c < dim; ++c) {
    const double* column = coords + c * n;
    const double p = point[c];
    for (std::size_t j = 0; j < n; ++j) {
      const double diff = column[j] - p;
      out[j] = out[j] + diff * diff;
    }
  }
}

double GaussianRow(const double* coords, std::size_t n, std::size_t dim,
                   const double* point, double scale, double* out) {
  SquaredDistances(coords, n, dim, point, out);
  double acc = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    out[j] = std::exp(scale * out[j]);
    acc += out[j];
  }
  return acc;
}

void LeakyRelu(const double* in, double slope, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = in[i] >= 0.0 ? in[i] : slope * in[i];
  }
}

void LeakyReluBackward(const double* pre, double slope, double* grad,
                       std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    if (!(pre[i] >= 0.0)) grad[i] = grad[i] * slope;
  }
}

void AdamUpdate(double* param, const double* grad, double* m, double* v,
                std::size_t n, double step_size, double beta1, double beta2,
                double c1, double c2, double eps) {
  const double one_minus_b1 = 1.0 - beta1;
  const double one_minus_b2 = 1.0 - beta2;
  for (std::size_t i = 0; i < n; ++i) {
    const double g = grad[i];
    m[i] = beta1 * m[i] + one_minus_b1 * g;
    v[i] = beta2 * v[i] + one_minus_b2 * (g * g);
    const double m_hat = m[i] / c1;
    const double v_hat = v[i] / c2;
    param[i] = param[i] - step_size * (m_hat / (std::sqrt(v_hat) + eps));
  }
}

}  // namespace

const KernelTable& ScalarKernels() {
  static const KernelTable table{
      .name = "scalar",
      .dot = Dot,
      .axpy = Axpy,
      .sum = Sum,
      .gemm_nt_sub = GemmNtSub,
      .squared_distances = SquaredDistances,
      .gaussian_row = GaussianRow,
      .leaky_relu = LeakyRelu,
      .leaky_relu_backward = LeakyReluBackward,
      .adam_update = AdamUpdate,
  };
  return table;
}

}  // namespace slicedp::simd
