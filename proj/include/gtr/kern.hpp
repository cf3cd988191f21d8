#pragma once

#include <cstddef>

// Dense double-precision kernels behind the network math. A scalar reference
// implementation always exists; an AVX2+FMA variant is selected at runtime on
// capable x86-64 hosts. Both variants are equivalence-tested against each
// other; within one process the active backend is fixed, so repeated runs are
// bit-identical.
namespace gtr::kern {

enum class Backend { Scalar, Avx2 };

Backend active_backend();
bool backend_supported(Backend b);
// Throws std::invalid_argument if the backend is not supported on this host.
void set_backend(Backend b);
const char* backend_name(Backend b);

// Row-major, contiguous matrices throughout.
// C(M,N) = A(M,K) * B(K,N)        [+ C if accumulate]
void gemm_nn(std::size_t m, std::size_t n, std::size_t k, const double* a,
             const double* b, double* c, bool accumulate);
// C(M,N) = A(K,M)^T * B(K,N)      [+ C if accumulate]
void gemm_tn(std::size_t m, std::size_t n, std::size_t k, const double* a,
             const double* b, double* c, bool accumulate);
// C(M,N) = A(M,K) * B(N,K)^T      [+ C if accumulate]
void gemm_nt(std::size_t m, std::size_t n, std::size_t k, const double* a,
             const double* b, double* c, bool accumulate);

// C(rows,cols) += v broadcast over rows.
void add_row_vector(std::size_t rows, std::size_t cols, double* c,
                    const double* v);
void relu_inplace(double* x, std::size_t n);
// grad[i] := 0 wherever activation[i] <= 0 (activation = post-ReLU values).
void relu_backward(std::size_t n, const double* activation, double* grad);
// out[j] = sum over rows of M(rows,cols).
void col_sums(std::size_t rows, std::size_t cols, const double* m, double* out);
double dot(std::size_t n, const double* x, const double* y);
// One fused Adam update; beta1_t/beta2_t are beta^t for bias correction.
void adam_step(std::size_t n, double* param, const double* grad, double* m,
               double* v, double beta1, double beta2, double eps, double lr,
               double beta1_t, double beta2_t);

// Internal: per-backend operation table.
struct Ops {
  void (*gemm_nn)(std::size_t, std::size_t, std::size_t, const double*,
                  const double*, double*, bool);
  void (*gemm_tn)(std::size_t, std::size_t, std::size_t, const double*,
                  const double*, double*, bool);
  void (*gemm_nt)(std::size_t, std::size_t, std::size_t, const double*,
                  const double*, double*, bool);
  void (*add_row_vector)(std::size_t, std::size_t, double*, const double*);
  void (*relu_inplace)(double*, std::size_t);
  void (*relu_backward)(std::size_t, const double*, double*);
  void (*col_sums)(std::size_t, std::size_t, const double*, double*);
  double (*dot)(std::size_t, const double*, const double*);
  void (*adam_step)(std::size_t, double*, const double*, double*, double*,
                    double, double, double, double, double, double);
};

const Ops& scalar_ops();
const Ops* avx2_ops();  // nullptr when not built or not supported

}  // namespace gtr::kern
