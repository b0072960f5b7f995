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

// Data-parallel inner loops used by the divergence estimator, the mechanism
// and the generator. Every kernel has a portable scalar reference
// implementation; an AVX2/FMA variant is selected at runtime when the CPU
// supports it. Set SLICEDP_SIMD=scalar in the environment to force the
// reference path.

#ifndef SLICEDP_SIMD_KERNELS_H_
#define SLICEDP_SIMD_KERNELS_H_

#include <cstddef>
#include <string_view>

namespace slicedp::simd {

struct KernelTable {
  std::string_view name;

  // sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);

  // y[i] += alpha * x[i]
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);

  // sum_i x[i]
  double (*sum)(const double* x, std::size_t n);

  // c[i ldc + j] -= sum_p a[i lda + p] * b[j ldb + p]
  // for i < rows, j < cols, p < depth: C -= A B^T on row-major tiles.
  void (*gemm_nt_sub)(std::size_t rows, std::size_t cols, std::size_t depth,
                      const double* a, std::size_t lda, const double* b,
                      std::size_t ldb, double* c, std::size_t ldc);

  // Points are stored coordinate-major: coords[c * n + j] is coordinate c of
  // point j. out[j] = sum_c (coords[c * n + j] - point[c])^2.
  void (*squared_distances)(const double* coords, std::size_t n,
                            std::size_t dim, const double* point,
                            double* out);

  // out[j] = exp(scale * ||coords_j - point||^2); returns sum_j out[j].
  // scale is -1 / (2 bw^2) for a Gaussian kernel of bandwidth bw.
  double (*gaussian_row)(const double* coords, std::size_t n,
                         std::size_t dim, const double* point, double scale,
                         double* out);

  // out[i] = in[i] >= 0 ? in[i] : slope * in[i]
  void (*leaky_relu)(const double* in, double slope, double* out,
                     std::size_t n);

  // grad[i] *= (pre[i] >= 0 ? 1 : slope)
  void (*leaky_relu_backward)(const double* pre, double slope, double* grad,
                              std::size_t n);

  // Bias-corrected adaptive-moment update of n parameters.
  //   m = beta1 m + (1 - beta1) g
  //   v = beta2 v + (1 - beta2) g^2
  //   p -= step_size * (m / c1) / (sqrt(v / c2) + eps)
  // with c1 = 1 - beta1^t and c2 = 1 - beta2^t supplied by the caller.
  void (*adam_update)(double* param, const double* grad, double* m,
                      double* v, std::size_t n, double step_size,
                      double beta1, double beta2, double c1, double c2,
                      double eps);
};

const KernelTable& ScalarKernels();

// nullptr when the binary was built without AVX2 support or the CPU lacks
// AVX2/FMA.
const KernelTable* Avx2Kernels();

// Chosen once per process.
const KernelTable& Kernels();

}  // namespace slicedp::simd

#endif  // SLICEDP_SIMD_KERNELS_H_
