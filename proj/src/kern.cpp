#include "gtr/kern.hpp"

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace gtr::kern {
namespace {

#if !defined(GTR_BUILD_AVX2)
const Ops* avx2_ops_or_null() { return nullptr; }
#else
const Ops* avx2_ops_or_null() {
#if defined(__x86_64__) || defined(_M_X64)
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) {
    return avx2_ops();
  }
#endif
  return nullptr;
}
#endif

Backend detect_backend() {
  if (const char* env = std::getenv("GTR_KERNEL_BACKEND")) {
    const std::string want(env);
    if (want == "scalar") return Backend::Scalar;
    if (want == "avx2" && avx2_ops_or_null()) return Backend::Avx2;
  }
  return avx2_ops_or_null() ? Backend::Avx2 : Backend::Scalar;
}

std::atomic<const Ops*>& active_ops_slot() {
  static std::atomic<const Ops*> slot{nullptr};
  return slot;
}
std::atomic<Backend>& active_backend_slot() {
  static std::atomic<Backend> slot{Backend::Scalar};
  return slot;
}

const Ops& active_ops() {
  const Ops* ops = active_ops_slot().load(std::memory_order_acquire);
  if (!ops) {
    const Backend b = detect_backend();
    ops = b == Backend::Avx2 ? avx2_ops_or_null() : &scalar_ops();
    active_backend_slot().store(b, std::memory_order_release);
    active_ops_slot().store(ops, std::memory_order_release);
  }
  return *ops;
}

}  // namespace

Backend active_backend() {
  active_ops();
  return active_backend_slot().load(std::memory_order_acquire);
}

bool backend_supported(Backend b) {
  return b == Backend::Scalar || avx2_ops_or_null() != nullptr;
}

void set_backend(Backend b) {
  if (!backend_supported(b)) {
    throw std::invalid_argument("kernel backend not supported on this host: " +
                                std::string(backend_name(b)));
  }
  active_backend_slot().store(b, std::memory_order_release);
  active_ops_slot().store(b == Backend::Avx2 ? avx2_ops_or_null()
                                             : &scalar_ops(),
                          std::memory_order_release);
}

const char* backend_name(Backend b) {
  return b == Backend::Avx2 ? "avx2" : "scalar";
}

void gemm_nn(std::size_t m, std::size_t n, std::size_t k, const double* a,
             const double* b, double* c, bool accumulate) {
  active_ops().gemm_nn(m, n, k, a, b, c, accumulate);
}
void gemm_tn(std::size_t m, std::size_t n, std::size_t k, const double* a,
             const double* b, double* c, bool accumulate) {
  active_ops().gemm_tn(m, n, k, a, b, c, accumulate);
}
void gemm_nt(std::size_t m, std::size_t n, std::size_t k, const double* a,
             const double* b, double* c, bool accumulate) {
  active_ops().gemm_nt(m, n, k, a, b, c, accumulate);
}
void add_row_vector(std::size_t rows, std::size_t cols, double* c,
                    const double* v) {
  active_ops().add_row_vector(rows, cols, c, v);
}
void relu_inplace(double* x, std::size_t n) { active_ops().relu_inplace(x, n); }
void relu_backward(std::size_t n, const double* activation, double* grad) {
  active_ops().relu_backward(n, activation, grad);
}
void col_sums(std::size_t rows, std::size_t cols, const double* m,
              double* out) {
  active_ops().col_sums(rows, cols, m, out);
}
double dot(std::size_t n, const double* x, const double* y) {
  return active_ops().dot(n, x, y);
}
void adam_step(std::size_t n, double* param, const double* grad, double* m,
               double* v, double beta1, double beta2, double eps, double lr,
               double beta1_t, double beta2_t) {
  active_ops().adam_step(n, param, grad, m, v, beta1, beta2, eps, lr, beta1_t,
                         beta2_t);
}

}  // namespace gtr::kern
