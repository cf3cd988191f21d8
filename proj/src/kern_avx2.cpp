// AVX2+FMA kernel variants. This translation unit is compiled with
// -mavx2 -mfma; it must only be reached through the runtime dispatcher.

#include "gtr/kern.hpp"

#if defined(__AVX2__) && defined(__FMA__)

#include <immintrin.h>

#include <cstring>

namespace gtr::kern {
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

void v_gemm_nn(std::size_t m, std::size_t n, std::size_t k, const double* a,
               const double* b, double* c, bool accumulate) {
  if (!accumulate) std::memset(c, 0, m * n * sizeof(double));
  for (std::size_t i = 0; i < m; ++i) {
    double* crow = c + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const __m256d aip = _mm256_set1_pd(a[i * k + p]);
      const double* brow = b + p * n;
      std::size_t j = 0;
      for (; j + 4 <= n; j += 4) {
        __m256d cj = _mm256_loadu_pd(crow + j);
        cj = _mm256_fmadd_pd(aip, _mm256_loadu_pd(brow + j), cj);
        _mm256_storeu_pd(crow + j, cj);
      }
      const double as = a[i * k + p];
      for (; j < n; ++j) crow[j] += as * brow[j];
    }
  }
}

void v_gemm_tn(std::size_t m, std::size_t n, std::size_t k, const double* a,
               const double* b, double* c, bool accumulate) {
  if (!accumulate) std::memset(c, 0, m * n * sizeof(double));
  for (std::size_t p = 0; p < k; ++p) {
    const double* arow = a + p * m;
    const double* brow = b + p * n;
    for (std::size_t i = 0; i < m; ++i) {
      const __m256d api = _mm256_set1_pd(arow[i]);
      double* crow = c + i * n;
      std::size_t j = 0;
      for (; j + 4 <= n; j += 4) {
        __m256d cj = _mm256_loadu_pd(crow + j);
        cj = _mm256_fmadd_pd(api, _mm256_loadu_pd(brow + j), cj);
        _mm256_storeu_pd(crow + j, cj);
      }
      const double as = arow[i];
      for (; j < n; ++j) crow[j] += as * brow[j];
    }
  }
}

void v_gemm_nt(std::size_t m, std::size_t n, std::size_t k, const double* a,
               const double* b, double* c, bool accumulate) {
  for (std::size_t i = 0; i < m; ++i) {
    const double* arow = a + i * k;
    for (std::size_t j = 0; j < n; ++j) {
      const double* brow = b + j * k;
      __m256d acc = _mm256_setzero_pd();
      std::size_t p = 0;
      for (; p + 4 <= k; p += 4) {
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(arow + p),
                              _mm256_loadu_pd(brow + p), acc);
      }
      double s = hsum(acc);
      for (; p < k; ++p) s += arow[p] * brow[p];
      double& dst = c[i * n + j];
      dst = accumulate ? dst + s : s;
    }
  }
}

void v_add_row_vector(std::size_t rows, std::size_t cols, double* c,
                      const double* v) {
  for (std::size_t i = 0; i < rows; ++i) {
    double* crow = c + i * cols;
    std::size_t j = 0;
    for (; j + 4 <= cols; j += 4) {
      _mm256_storeu_pd(crow + j, _mm256_add_pd(_mm256_loadu_pd(crow + j),
                                               _mm256_loadu_pd(v + j)));
    }
    for (; j < cols; ++j) crow[j] += v[j];
  }
}

void v_relu_inplace(double* x, std::size_t n) {
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(x + i, _mm256_max_pd(zero, _mm256_loadu_pd(x + i)));
  }
  for (; i < n; ++i) x[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void v_relu_backward(std::size_t n, const double* activation, double* grad) {
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d act = _mm256_loadu_pd(activation + i);
    const __m256d mask = _mm256_cmp_pd(act, zero, _CMP_GT_OQ);
    _mm256_storeu_pd(grad + i,
                     _mm256_and_pd(mask, _mm256_loadu_pd(grad + i)));
  }
  for (; i < n; ++i) {
    if (activation[i] <= 0.0) grad[i] = 0.0;
  }
}

void v_col_sums(std::size_t rows, std::size_t cols, const double* m,
                double* out) {
  std::memset(out, 0, cols * sizeof(double));
  for (std::size_t i = 0; i < rows; ++i) {
    const double* row = m + i * cols;
    std::size_t j = 0;
    for (; j + 4 <= cols; j += 4) {
      _mm256_storeu_pd(out + j, _mm256_add_pd(_mm256_loadu_pd(out + j),
                                              _mm256_loadu_pd(row + j)));
    }
    for (; j < cols; ++j) out[j] += row[j];
  }
}

double v_dot(std::size_t n, const double* x, const double* y) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

void v_adam_step(std::size_t n, double* param, const double* grad, double* m,
                 double* v, double beta1, double beta2, double eps, double lr,
                 double beta1_t, double beta2_t) {
  const double mc = 1.0 / (1.0 - beta1_t);
  const double vc = 1.0 / (1.0 - beta2_t);
  const __m256d vb1 = _mm256_set1_pd(beta1);
  const __m256d vb2 = _mm256_set1_pd(beta2);
  const __m256d vb1c = _mm256_set1_pd(1.0 - beta1);
  const __m256d vb2c = _mm256_set1_pd(1.0 - beta2);
  const __m256d vmc = _mm256_set1_pd(mc);
  const __m256d vvc = _mm256_set1_pd(vc);
  const __m256d veps = _mm256_set1_pd(eps);
  const __m256d vlr = _mm256_set1_pd(lr);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d g = _mm256_loadu_pd(grad + i);
    __m256d mi = _mm256_loadu_pd(m + i);
    __m256d vi = _mm256_loadu_pd(v + i);
    mi = _mm256_fmadd_pd(vb1, mi, _mm256_mul_pd(vb1c, g));
    vi = _mm256_fmadd_pd(vb2, vi, _mm256_mul_pd(vb2c, _mm256_mul_pd(g, g)));
    _mm256_storeu_pd(m + i, mi);
    _mm256_storeu_pd(v + i, vi);
    const __m256d mhat = _mm256_mul_pd(mi, vmc);
    const __m256d denom =
        _mm256_add_pd(_mm256_sqrt_pd(_mm256_mul_pd(vi, vvc)), veps);
    const __m256d step = _mm256_div_pd(_mm256_mul_pd(vlr, mhat), denom);
    _mm256_storeu_pd(param + i,
                     _mm256_sub_pd(_mm256_loadu_pd(param + i), step));
  }
  if (i < n) {
    scalar_ops().adam_step(n - i, param + i, grad + i, m + i, v + i, beta1,
                           beta2, eps, lr, beta1_t, beta2_t);
  }
}

}  // namespace

const Ops* avx2_ops() {
  static const Ops ops = {v_gemm_nn,        v_gemm_tn,  v_gemm_nt,
                          v_add_row_vector, v_relu_inplace,
                          v_relu_backward,  v_col_sums, v_dot,
                          v_adam_step};
  return &ops;
}

}  // namespace gtr::kern

#else

namespace gtr::kern {
const Ops* avx2_ops() { return nullptr; }
}  // namespace gtr::kern

#endif
