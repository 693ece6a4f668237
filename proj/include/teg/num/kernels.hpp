#pragma once

#include <cstddef>

// Dense float64 kernels used by the tensor ops. Each parallel kernel writes
// every output element from an independent reduction over inputs, so the
// summation order per element is fixed regardless of thread count and results
// are bitwise identical to the serial twins in kernels::serial.
namespace teg::num::kernels {

// Toggle for the OpenMP paths. When disabled the parallel entry points run
// their loops on the calling thread only. Thread-safe to read; set once at
// startup (or from a test) before heavy work.
bool parallel_enabled();
void set_parallel_enabled(bool on);

// c[m,n] = a[m,k] * b[k,n]; accumulates into c when acc is true.
void matmul_nn(const double* a, const double* b, double* c, size_t m, size_t k, size_t n,
               bool acc);
// c[m,n] = a[m,k] * b[n,k]^T
void matmul_nt(const double* a, const double* b, double* c, size_t m, size_t k, size_t n,
               bool acc);
// c[k,n] = a[m,k]^T * b[m,n]
void matmul_tn(const double* a, const double* b, double* c, size_t m, size_t k, size_t n,
               bool acc);

// Row-wise softmax with max subtraction. y may alias x.
void softmax_rows(const double* x, double* y, size_t rows, size_t cols);

namespace serial {
void matmul_nn(const double* a, const double* b, double* c, size_t m, size_t k, size_t n,
               bool acc);
void matmul_nt(const double* a, const double* b, double* c, size_t m, size_t k, size_t n,
               bool acc);
void matmul_tn(const double* a, const double* b, double* c, size_t m, size_t k, size_t n,
               bool acc);
void softmax_rows(const double* x, double* y, size_t rows, size_t cols);
}  // namespace serial

}  // namespace teg::num::kernels
