// Copyright (c) 2026 The blurf Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

namespace blurf::kernels {

// Every parallel kernel assigns whole output elements to a single thread and
// computes them with a fixed-order serial inner loop, so results are bitwise
// identical to the *_serial reference regardless of thread count. That is the
// property the determinism contract of the training loop rests on; the
// test suite asserts serial/parallel equality and the bench target compares
// their throughput.

bool parallel_enabled();
void set_parallel(bool on);

/// Applies the BLURF_THREADS environment cap, if set. Returns thread count.
int configure_threads();
int max_threads();

inline constexpr std::int64_t kParallelGrain = 4096;

// C(BxO) = A(BxI) * W(IxO)
void matmul_serial(const double* a, const double* w, double* c, int b, int i, int o);
void matmul(const double* a, const double* w, double* c, int b, int i, int o);

// dA(BxI) += dC(BxO) * W(IxO)^T
void matmul_grad_lhs_serial(const double* dc, const double* w, double* da, int b, int i, int o);
void matmul_grad_lhs(const double* dc, const double* w, double* da, int b, int i, int o);

// dW(IxO) += A(BxI)^T * dC(BxO)
void matmul_grad_rhs_serial(const double* a, const double* dc, double* dw, int b, int i, int o);
void matmul_grad_rhs(const double* a, const double* dc, double* dw, int b, int i, int o);

// Per-block exclusive prefix sum over rows: rows are grouped in blocks of m,
// each column treated independently. out[r] = sum of in[r'] for r' < r within
// the block.
void block_cumsum_exclusive_serial(const double* in, double* out, int rows, int cols, int m);
void block_cumsum_exclusive(const double* in, double* out, int rows, int cols, int m);

// Backward of the above: din[r] += sum of dout[r'] for r' > r within block.
void block_suffix_sum_add_serial(const double* dout, double* din, int rows, int cols, int m);
void block_suffix_sum_add(const double* dout, double* din, int rows, int cols, int m);

// (B*m x C) -> (B x C), summing each block of m rows.
void block_sum_serial(const double* in, double* out, int blocks, int m, int cols);
void block_sum(const double* in, double* out, int blocks, int m, int cols);

// (B x C) -> (B*m x C), repeating each row m times.
void block_expand_serial(const double* in, double* out, int blocks, int m, int cols);
void block_expand(const double* in, double* out, int blocks, int m, int cols);

/// Elementwise map; parallel over elements when large enough.
template <class F>
void map1(const double* x, double* y, std::int64_t n, F f) {
  if (parallel_enabled() && n >= kParallelGrain) {
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) y[i] = f(x[i]);
  } else {
    for (std::int64_t i = 0; i < n; ++i) y[i] = f(x[i]);
  }
}

template <class F>
void map2(const double* a, const double* b, double* y, std::int64_t n, F f) {
  if (parallel_enabled() && n >= kParallelGrain) {
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) y[i] = f(a[i], b[i]);
  } else {
    for (std::int64_t i = 0; i < n; ++i) y[i] = f(a[i], b[i]);
  }
}

/// y[i] += f(...) accumulation variant.
template <class F>
void accum1(const double* x, double* y, std::int64_t n, F f) {
  if (parallel_enabled() && n >= kParallelGrain) {
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) y[i] += f(x[i]);
  } else {
    for (std::int64_t i = 0; i < n; ++i) y[i] += f(x[i]);
  }
}

/// Serial sum; reduction order is fixed by construction.
double sum_serial(const double* x, std::int64_t n);

}  // namespace blurf::kernels
