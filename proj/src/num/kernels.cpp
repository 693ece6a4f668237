#include "teg/num/kernels.hpp"

#include <atomic>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace teg::num::kernels {

namespace {
std::atomic<bool> g_parallel{true};

// Below this many output elements the OpenMP fork costs more than it saves.
constexpr size_t kParallelCutoff = 4096;

bool use_parallel(size_t work) {
#ifdef _OPENMP
    return g_parallel.load(std::memory_order_relaxed) && work >= kParallelCutoff;
#else
    (void)work;
    return false;
#endif
}
}  // namespace

bool parallel_enabled() { return g_parallel.load(std::memory_order_relaxed); }
void set_parallel_enabled(bool on) { g_parallel.store(on, std::memory_order_relaxed); }

namespace serial {

void matmul_nn(const double* a, const double* b, double* c, size_t m, size_t k, size_t n,
               bool acc) {
    for (size_t i = 0; i < m; ++i) {
        for (size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (size_t p = 0; p < k; ++p) s += a[i * k + p] * b[p * n + j];
            if (acc)
                c[i * n + j] += s;
            else
                c[i * n + j] = s;
        }
    }
}

void matmul_nt(const double* a, const double* b, double* c, size_t m, size_t k, size_t n,
               bool acc) {
    for (size_t i = 0; i < m; ++i) {
        for (size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (size_t p = 0; p < k; ++p) s += a[i * k + p] * b[j * k + p];
            if (acc)
                c[i * n + j] += s;
            else
                c[i * n + j] = s;
        }
    }
}

void matmul_tn(const double* a, const double* b, double* c, size_t m, size_t k, size_t n,
               bool acc) {
    for (size_t i = 0; i < k; ++i) {
        for (size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (size_t p = 0; p < m; ++p) s += a[p * k + i] * b[p * n + j];
            if (acc)
                c[i * n + j] += s;
            else
                c[i * n + j] = s;
        }
    }
}

void softmax_rows(const double* x, double* y, size_t rows, size_t cols) {
    for (size_t r = 0; r < rows; ++r) {
        const double* xr = x + r * cols;
        double* yr = y + r * cols;
        double mx = xr[0];
        for (size_t j = 1; j < cols; ++j)
            if (xr[j] > mx) mx = xr[j];
        double denom = 0.0;
        for (size_t j = 0; j < cols; ++j) {
            yr[j] = std::exp(xr[j] - mx);
            denom += yr[j];
        }
        for (size_t j = 0; j < cols; ++j) yr[j] /= denom;
    }
}

}  // namespace serial

void matmul_nn(const double* a, const double* b, double* c, size_t m, size_t k, size_t n,
               bool acc) {
    if (!use_parallel(m * n * k)) {
        serial::matmul_nn(a, b, c, m, k, n, acc);
        return;
    }
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
    for (long long ii = 0; ii < (long long)m; ++ii) {
        size_t i = (size_t)ii;
        for (size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (size_t p = 0; p < k; ++p) s += a[i * k + p] * b[p * n + j];
            if (acc)
                c[i * n + j] += s;
            else
                c[i * n + j] = s;
        }
    }
#endif
}

void matmul_nt(const double* a, const double* b, double* c, size_t m, size_t k, size_t n,
               bool acc) {
    if (!use_parallel(m * n * k)) {
        serial::matmul_nt(a, b, c, m, k, n, acc);
        return;
    }
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
    for (long long ii = 0; ii < (long long)m; ++ii) {
        size_t i = (size_t)ii;
        for (size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (size_t p = 0; p < k; ++p) s += a[i * k + p] * b[j * k + p];
            if (acc)
                c[i * n + j] += s;
            else
                c[i * n + j] = s;
        }
    }
#endif
}

void matmul_tn(const double* a, const double* b, double* c, size_t m, size_t k, size_t n,
               bool acc) {
    if (!use_parallel(m * n * k)) {
        serial::matmul_tn(a, b, c, m, k, n, acc);
        return;
    }
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
    for (long long ii = 0; ii < (long long)k; ++ii) {
        size_t i = (size_t)ii;
        for (size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (size_t p = 0; p < m; ++p) s += a[p * k + i] * b[p * n + j];
            if (acc)
                c[i * n + j] += s;
            else
                c[i * n + j] = s;
        }
    }
#endif
}

void softmax_rows(const double* x, double* y, size_t rows, size_t cols) {
    if (!use_parallel(rows * cols)) {
        serial::softmax_rows(x, y, rows, cols);
        return;
    }
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
    for (long long rr = 0; rr < (long long)rows; ++rr) {
        size_t r = (size_t)rr;
        const double* xr = x + r * cols;
        double* yr = y + r * cols;
        double mx = xr[0];
        for (size_t j = 1; j < cols; ++j)
            if (xr[j] > mx) mx = xr[j];
        double denom = 0.0;
        for (size_t j = 0; j < cols; ++j) {
            yr[j] = std::exp(xr[j] - mx);
            denom += yr[j];
        }
        for (size_t j = 0; j < cols; ++j) yr[j] /= denom;
    }
#endif
}

}  // namespace teg::num::kernels
