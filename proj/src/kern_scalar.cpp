#include <cmath>
#include <cstring>

#include "gtr/kern.hpp"

namespace gtr::kern {
namespace {

void s_gemm_nn(std::size_t m, std::size_t n, std::size_t k, const double* a,
               const double* b, double* c, bool accumulate) {
  if (!accumulate) std::memset(c, 0, m * n * sizeof(double));
  for (std::size_t i = 0; i < m; ++i) {
    double* crow = c + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = a[i * k + p];
      const double* brow = b + p * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += aip * brow[j];
    }
  }
}

void s_gemm_tn(std::size_t m, std::size_t n, std::size_t k, const double* a,
               const double* b, double* c, bool accumulate) {
  if (!accumulate) std::memset(c, 0, m * n * sizeof(double));
  for (std::size_t p = 0; p < k; ++p) {
    const double* arow = a + p * m;
    const double* brow = b + p * n;
    for (std::size_t i = 0; i < m; ++i) {
      const double api = arow[i];
      double* crow = c + i * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += api * brow[j];
    }
  }
}

void s_gemm_nt(std::size_t m, std::size_t n, std::size_t k, const double* a,
               const double* b, double* c, bool accumulate) {
  for (std::size_t i = 0; i < m; ++i) {
    const double* arow = a + i * k;
    for (std::size_t j = 0; j < n; ++j) {
      const double* brow = b + j * k;
      double acc = 0.0;
      for (std::size_t p = 0; p < k; ++p) acc += arow[p] * brow[p];
      double& dst = c[i * n + j];
      dst = accumulate ? dst + acc : acc;
    }
  }
}

void s_add_row_vector(std::size_t rows, std::size_t cols, double* c,
                      const double* v) {
  for (std::size_t i = 0; i < rows; ++i) {
    double* crow = c + i * cols;
    for (std::size_t j = 0; j < cols; ++j) crow[j] += v[j];
  }
}

void s_relu_inplace(double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] = x[i] > 0.0 ? x[i] : 0.0;
}

void s_relu_backward(std::size_t n, const double* activation, double* grad) {
  for (std::size_t i = 0; i < n; ++i) {
    if (activation[i] <= 0.0) grad[i] = 0.0;
  }
}

void s_col_sums(std::size_t rows, std::size_t cols, const double* m,
                double* out) {
  std::memset(out, 0, cols * sizeof(double));
  for (std::size_t i = 0; i < rows; ++i) {
    const double* row = m + i * cols;
    for (std::size_t j = 0; j < cols; ++j) out[j] += row[j];
  }
}

double s_dot(std::size_t n, const double* x, const double* y) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

void s_adam_step(std::size_t n, double* param, const double* grad, double* m,
                 double* v, double beta1, double beta2, double eps, double lr,
                 double beta1_t, double beta2_t) {
  const double mc = 1.0 / (1.0 - beta1_t);
  const double vc = 1.0 / (1.0 - beta2_t);
  for (std::size_t i = 0; i < n; ++i) {
    const double g = grad[i];
    m[i] = beta1 * m[i] + (1.0 - beta1) * g;
    v[i] = beta2 * v[i] + (1.0 - beta2) * g * g;
    param[i] -= lr * (m[i] * mc) / (std::sqrt(v[i] * vc) + eps);
  }
}

}  // namespace

const Ops& scalar_ops() {
  static const Ops ops = {s_gemm_nn,        s_gemm_tn,  s_gemm_nt,
                          s_add_row_vector, s_relu_inplace,
                          s_relu_backward,  s_col_sums, s_dot,
                          s_adam_step};
  return ops;
}

}  // namespace gtr::kern
