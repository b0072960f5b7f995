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

#include <immintrin.h>

#include <cstring>

#include "kernels_internal.h"

namespace slicedp::simd::internal {
namespace {

double HorizontalSum(__m256d v) {
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, v);
  return (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
}

// exp() for four doubles, Cephes rational approximation on [-ln2/2, ln2/2]
// followed by exponent reconstruction. Results below the normal range are
// flushed to zero and inputs above 709 saturate at exp(709).
__m256d Exp4(__m256d x) {
  const __m256d kMax = _mm256_set1_pd(709.0);
  const __m256d kMin = _mm256_set1_pd(-708.39641853226408);
  const __m256d kLog2e = _mm256_set1_pd(1.4426950408889634073599);
  const __m256d kC1 = _mm256_set1_pd(6.93145751953125e-1);
  const __m256d kC2 = _mm256_set1_pd(1.42860682030941723212e-6);
  const __m256d kP0 = _mm256_set1_pd(1.26177193074810590878e-4);
  const __m256d kP1 = _mm256_set1_pd(3.02994407707441961300e-2);
  const __m256d kP2 = _mm256_set1_pd(9.99999999999999999910e-1);
  const __m256d kQ0 = _mm256_set1_pd(3.00198505138664455042e-6);
  const __m256d kQ1 = _mm256_set1_pd(2.52448340349684104192e-3);
  const __m256d kQ2 = _mm256_set1_pd(2.27265548208155028766e-1);
  const __m256d kQ3 = _mm256_set1_pd(2.00000000000000000009e0);
  const __m256d kHalf = _mm256_set1_pd(0.5);
  const __m256d kOne = _mm256_set1_pd(1.0);
  const __m256d kTwo = _mm256_set1_pd(2.0);

  const __m256d input = x;
  const __m256d nan = _mm256_cmp_pd(x, x, _CMP_UNORD_Q);
  const __m256d underflow = _mm256_cmp_pd(x, kMin, _CMP_LT_OQ);
  x = _mm256_min_pd(_mm256_max_pd(x, kMin), kMax);

  const __m256d fx = _mm256_floor_pd(_mm256_fmadd_pd(x, kLog2e, kHalf));
  x = _mm256_fnmadd_pd(fx, kC1, x);
  x = _mm256_fnmadd_pd(fx, kC2, x);

  const __m256d xx = _mm256_mul_pd(x, x);
  __m256d px = _mm256_fmadd_pd(kP0, xx, kP1);
  px = _mm256_fmadd_pd(px, xx, kP2);
  px = _mm256_mul_pd(px, x);
  __m256d qx = _mm256_fmadd_pd(kQ0, xx, kQ1);
  qx = _mm256_fmadd_pd(qx, xx, kQ2);
  qx = _mm256_fmadd_pd(qx, xx, kQ3);
  __m256d r = _mm256_div_pd(px, _mm256_sub_pd(qx, px));
  r = _mm256_fmadd_pd(kTwo, r, kOne);

  // 2^fx via the exponent field; fx is in [-1022, 1023].
  const __m128i n32 = _mm256_cvtpd_epi32(fx);
  __m256i n64 = _mm256_cvtepi32_epi64(n32);
  n64 = _mm256_add_epi64(n64, _mm256_set1_epi64x(1023));
  n64 = _mm256_slli_epi64(n64, 52);
  r = _mm256_mul_pd(r, _mm256_castsi256_pd(n64));
  return _mm256_blendv_pd(_mm256_andnot_pd(underflow, r), input, nan);
}

double Dot(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i),
                           acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4),
                           _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i),
                           acc0);
  }
  double acc = HorizontalSum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void Axpy(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d r = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i),
                                      _mm256_loadu_pd(y + i));
    _mm256_storeu_pd(y + i, r);
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

// 2 x 4 register tile of dot products.
void GemmNtSub(std::size_t rows, std::size_t cols, std::size_t depth,
               const double* a, std::size_t lda, const double* b,
               std::size_t ldb, double* c, std::size_t ldc) {
  const std::size_t depth4 = depth & ~std::size_t{3};
  std::size_t i = 0;
  for (; i + 2 <= rows; i += 2) {
    const double* a0 = a + i * lda;
    const double* a1 = a0 + lda;
    std::size_t j = 0;
    for (; j + 4 <= cols; j += 4) {
      const double* b0 = b + j * ldb;
      const double* b1 = b0 + ldb;
      const double* b2 = b1 + ldb;
      const double* b3 = b2 + ldb;
      __m256d c00 = _mm256_setzero_pd(), c01 = _mm256_setzero_pd();
      __m256d c02 = _mm256_setzero_pd(), c03 = _mm256_setzero_pd();
      __m256d c10 = _mm256_setzero_pd(), c11 = _mm256_setzero_pd();
      __m256d c12 = _mm256_setzero_pd(), c13 = _mm256_setzero_pd();
      for (std::size_t p = 0; p < depth4; p += 4) {
        const __m256d x0 = _mm256_loadu_pd(a0 + p);
        const __m256d x1 = _mm256_loadu_pd(a1 + p);
        __m256d y = _mm256_loadu_pd(b0 + p);
        c00 = _mm256_fmadd_pd(x0, y, c00);
        c10 = _mm256_fmadd_pd(x1, y, c10);
        y = _mm256_loadu_pd(b1 + p);
        c01 = _mm256_fmadd_pd(x0, y, c01);
        c11 = _mm256_fmadd_pd(x1, y, c11);
        y = _mm256_loadu_pd(b2 + p);
        c02 = _mm256_fmadd_pd(x0, y, c02);
        c12 = _mm256_fmadd_pd(x1, y, c12);
        y = _mm256_loadu_pd(b3 + p);
        c03 = _mm256_fmadd_pd(x0, y, c03);
        c13 = _mm256_fmadd_pd(x1, y, c13);
      }
      double t[2][4] = {
          {HorizontalSum(c00), HorizontalSum(c01), HorizontalSum(c02),
           HorizontalSum(c03)},
          {HorizontalSum(c10), HorizontalSum(c11), HorizontalSum(c12),
           HorizontalSum(c13)}};
      for (std::size_t p = depth4; p < depth; ++p) {
        for (int q = 0; q < 4; ++q) {
          t[0][q] += a0[p] * b[(j + q) * ldb + p];
          t[1][q] += a1[p] * b[(j + q) * ldb + p];
        }
      }
      for (int q = 0; q < 4; ++q) {
        c[i * ldc + j + q] -= t[0][q];
        c[(i + 1) * ldc + j + q] -= t[1][q];
      }
    }
    for (; j < cols; ++j) {
      c[i * ldc + j] -= Dot(a0, b + j * ldb, depth);
      c[(i + 1) * ldc + j] -= Dot(a1, b + j * ldb, depth);
    }
  }
  for (; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      c[i * ldc + j] -= Dot(a + i * lda, b + j * ldb, depth);
    }
  }
}

double Sum(const double* x, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(x + i));
    acc1 = _mm256_add_pd(acc1, _mm256_loadu_pd(x + i + 4));
  }
  for (; i + 4 <= n; i += 4) acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(x + i));
  double acc = HorizontalSum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += x[i];
  return acc;
}

void SquaredDistances(const double* coords, std::size_t n, std::size_t dim,
                      const double* point, double* out) {
  std::memset(out, 0, n * sizeof(double));
  for (std::size_t c = 0; c < dim; ++c) {
    const double* column = coords + c * n;
    const __m256d p = _mm256_set1_pd(point[c]);
    std::size_t j = 0;
    for (; j + 4 <= n; j += 4) {
      const __m256d diff = _mm256_sub_pd(_mm256_loadu_pd(column + j), p);
      const __m256d acc = _mm256_add_pd(_mm256_loadu_pd(out + j),
                                        _mm256_mul_pd(diff, diff));
      _mm256_storeu_pd(out + j, acc);
    }
    for (; j < n; ++j) {
      const double diff = column[j] - point[c];
      out[j] = out[j] + diff * diff;
    }
  }
}

double GaussianRow(const double* coords, std::size_t n, std::size_t dim,
                   const double* point, double scale, double* out) {
  SquaredDistances(coords, n, dim, point, out);
  const __m256d vs = _mm256_set1_pd(scale);
  __m256d acc = _mm256_setzero_pd();
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d e = Exp4(_mm256_mul_pd(vs, _mm256_loadu_pd(out + j)));
    _mm256_storeu_pd(out + j, e);
    acc = _mm256_add_pd(acc, e);
  }
  double total = HorizontalSum(acc);
  if (j < n) {
    alignas(32) double tail[4] = {0.0, 0.0, 0.0, 0.0};
    for (std::size_t t = 0; j + t < n; ++t) tail[t] = out[j + t];
    _mm256_store_pd(tail, Exp4(_mm256_mul_pd(vs, _mm256_load_pd(tail))));
    for (std::size_t t = 0; j + t < n; ++t) {
      out[j + t] = tail[t];
      total += tail[t];
    }
  }
  return total;
}

void LeakyRelu(const double* in, double slope, double* out, std::size_t n) {
  const __m256d vslope = _mm256_set1_pd(slope);
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d x = _mm256_loadu_pd(in + i);
    const __m256d keep = _mm256_cmp_pd(x, zero, _CMP_GE_OQ);
    _mm256_storeu_pd(out + i,
                     _mm256_blendv_pd(_mm256_mul_pd(vslope, x), x, keep));
  }
  for (; i < n; ++i) out[i] = in[i] >= 0.0 ? in[i] : slope * in[i];
}

void LeakyReluBackward(const double* pre, double slope, double* grad,
                       std::size_t n) {
  const __m256d vslope = _mm256_set1_pd(slope);
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d keep =
        _mm256_cmp_pd(_mm256_loadu_pd(pre + i), zero, _CMP_GE_OQ);
    const __m256d g = _mm256_loadu_pd(grad + i);
    _mm256_storeu_pd(grad + i,
                     _mm256_blendv_pd(_mm256_mul_pd(g, vslope), g, keep));
  }
  for (; i < n; ++i) {
    if (!(pre[i] >= 0.0)) grad[i] = grad[i] * slope;
  }
}

void AdamUpdate(double* param, const double* grad, double* m, double* v,
                std::size_t n, double step_size, double beta1, double beta2,
                double c1, double c2, double eps) {
  const double one_minus_b1 = 1.0 - beta1;
  const double one_minus_b2 = 1.0 - beta2;
  const __m256d vb1 = _mm256_set1_pd(beta1);
  const __m256d vb2 = _mm256_set1_pd(beta2);
  const __m256d vomb1 = _mm256_set1_pd(one_minus_b1);
  const __m256d vomb2 = _mm256_set1_pd(one_minus_b2);
  const __m256d vc1 = _mm256_set1_pd(c1);
  const __m256d vc2 = _mm256_set1_pd(c2);
  const __m256d veps = _mm256_set1_pd(eps);
  const __m256d vstep = _mm256_set1_pd(step_size);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d g = _mm256_loadu_pd(grad + i);
    const __m256d mi = _mm256_add_pd(_mm256_mul_pd(vb1, _mm256_loadu_pd(m + i)),
                                     _mm256_mul_pd(vomb1, g));
    const __m256d vi =
        _mm256_add_pd(_mm256_mul_pd(vb2, _mm256_loadu_pd(v + i)),
                      _mm256_mul_pd(vomb2, _mm256_mul_pd(g, g)));
    _mm256_storeu_pd(m + i, mi);
    _mm256_storeu_pd(v + i, vi);
    const __m256d m_hat = _mm256_div_pd(mi, vc1);
    const __m256d v_hat = _mm256_div_pd(vi, vc2);
    const __m256d ratio =
        _mm256_div_pd(m_hat, _mm256_add_pd(_mm256_sqrt_pd(v_hat), veps));
    const __m256d p = _mm256_sub_pd(_mm256_loadu_pd(param + i),
                                    _mm256_mul_pd(vstep, ratio));
    _mm256_storeu_pd(param + i, p);
  }
  for (; i < n; ++i) {
    const double g = grad[i];
    m[i] = beta1 * m[i] + one_minus_b1 * g;
    v[i] = beta2 * v[i] + one_minus_b2 * (g * g);
    const double m_hat = m[i] / c1;
    const double v_hat = v[i] / c2;
    param[i] = param[i] - step_size * (m_hat / (__builtin_sqrt(v_hat) + eps));
  }
}

}  // namespace

const KernelTable& Avx2KernelTable() {
  static const KernelTable table{
      .name = "avx2",
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

}  // namespace slicedp::simd::internal
