// Copyright (c) 2026 The blurf Authors.
// SPDX-License-Identifier: Apache-2.0
#include "blurf/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <cstring>

namespace blurf::kernels {

namespace {
std::atomic<bool> g_parallel{true};
}

bool parallel_enabled() { return g_parallel.load(std::memory_order_relaxed); }
void set_parallel(bool on) { g_parallel.store(on, std::memory_order_relaxed); }

int configure_threads() {
  int n = omp_get_max_threads();
  if (const char* cap = std::getenv("BLURF_THREADS")) {
    int c = std::atoi(cap);
    if (c >= 1 && c < n) n = c;
  }
  omp_set_num_threads(n);
  return n;
}

int max_threads() { return omp_get_max_threads(); }

namespace {

inline void matmul_row(const double* a, const double* w, double* c, int i, int o) {
  std::memset(c, 0, sizeof(double) * o);
  for (int k = 0; k < i; ++k) {
    const double av = a[k];
    const double* wr = w + std::int64_t(k) * o;
    for (int j = 0; j < o; ++j) c[j] += av * wr[j];
  }
}

inline void grad_lhs_row(const double* dc, const double* w, double* da, int i, int o) {
  // j-major accumulation; the parallel path mirrors this order exactly
  for (int j = 0; j < o; ++j) {
    const double gv = dc[j];
    if (gv == 0.0) continue;
    for (int k = 0; k < i; ++k) da[k] += gv * w[std::int64_t(k) * o + j];
  }
}

inline void grad_rhs_row(const double* a, const double* dc, double* dw, int b, int k, int i, int o) {
  // One thread owns row k of dW; loops over the batch serially.
  double* wr = dw + std::int64_t(k) * o;
  for (int r = 0; r < b; ++r) {
    const double av = a[std::int64_t(r) * i + k];
    if (av == 0.0) continue;
    const double* dcr = dc + std::int64_t(r) * o;
    for (int j = 0; j < o; ++j) wr[j] += av * dcr[j];
  }
}

}  // namespace

void matmul_serial(const double* a, const double* w, double* c, int b, int i, int o) {
  for (int r = 0; r < b; ++r)
    matmul_row(a + std::int64_t(r) * i, w, c + std::int64_t(r) * o, i, o);
}

void matmul(const double* a, const double* w, double* c, int b, int i, int o) {
  if (!parallel_enabled() || std::int64_t(b) * i * o < kParallelGrain) {
    matmul_serial(a, w, c, b, i, o);
    return;
  }
#pragma omp parallel for schedule(static)
  for (int r = 0; r < b; ++r)
    matmul_row(a + std::int64_t(r) * i, w, c + std::int64_t(r) * o, i, o);
}

void matmul_grad_lhs_serial(const double* dc, const double* w, double* da, int b, int i, int o) {
  for (int r = 0; r < b; ++r)
    grad_lhs_row(dc + std::int64_t(r) * o, w, da + std::int64_t(r) * i, i, o);
}

namespace {

// dA row via the transposed weights: contiguous accumulation over i lanes
// instead of a latency-bound dot per element. Accumulation order over j is
// ascending either way, so results match the serial reference bitwise.
inline void grad_lhs_row_wt(const double* dc, const double* wt, double* da, int i, int o) {
  for (int j = 0; j < o; ++j) {
    const double gv = dc[j];
    if (gv == 0.0) continue;
    const double* wr = wt + std::int64_t(j) * i;
    for (int k = 0; k < i; ++k) da[k] += gv * wr[k];
  }
}

}  // namespace

void matmul_grad_lhs(const double* dc, const double* w, double* da, int b, int i, int o) {
  if (!parallel_enabled() || std::int64_t(b) * i * o < kParallelGrain) {
    matmul_grad_lhs_serial(dc, w, da, b, i, o);
    return;
  }
  // ops are issued from one thread per tape, so shared scratch is safe
  static std::vector<double> wt;
  wt.resize(std::size_t(i) * o);
#pragma omp parallel
  {
#pragma omp for schedule(static)
    for (int j = 0; j < o; ++j)
      for (int k = 0; k < i; ++k) wt[std::size_t(j) * i + k] = w[std::size_t(k) * o + j];
#pragma omp for schedule(static)
    for (int r = 0; r < b; ++r)
      grad_lhs_row_wt(dc + std::int64_t(r) * o, wt.data(), da + std::int64_t(r) * i, i, o);
  }
}

void matmul_grad_rhs_serial(const double* a, const double* dc, double* dw, int b, int i, int o) {
  for (int k = 0; k < i; ++k) grad_rhs_row(a, dc, dw, b, k, i, o);
}

void matmul_grad_rhs(const double* a, const double* dc, double* dw, int b, int i, int o) {
  if (!parallel_enabled() || std::int64_t(b) * i * o < kParallelGrain) {
    matmul_grad_rhs_serial(a, dc, dw, b, i, o);
    return;
  }
  // transposed copy of A gives contiguous per-k rows; each thread owns a k
  // range and walks the batch in row blocks so the dC tile stays cached.
  // Accumulation order over r matches the serial reference exactly. Ops are
  // issued from one thread per tape, so the shared scratch is safe.
  static std::vector<double> at;
  at.resize(std::size_t(i) * b);
#pragma omp parallel
  {
#pragma omp for schedule(static)
    for (int k = 0; k < i; ++k)
      for (int r = 0; r < b; ++r) at[std::size_t(k) * b + r] = a[std::size_t(r) * i + k];
#pragma omp for schedule(static)
    for (int k = 0; k < i; ++k) {
      double* wr = dw + std::int64_t(k) * o;
      const double* ak = at.data() + std::size_t(k) * b;
      for (int r0 = 0; r0 < b; r0 += 64) {
        const int r1 = std::min(b, r0 + 64);
        for (int r = r0; r < r1; ++r) {
          const double av = ak[r];
          if (av == 0.0) continue;
          const double* dcr = dc + std::int64_t(r) * o;
          for (int j = 0; j < o; ++j) wr[j] += av * dcr[j];
        }
      }
    }
  }
}

void block_cumsum_exclusive_serial(const double* in, double* out, int rows, int cols, int m) {
  const int blocks = rows / m;
  for (int blk = 0; blk < blocks; ++blk) {
    const std::int64_t base = std::int64_t(blk) * m * cols;
    for (int c = 0; c < cols; ++c) {
      double acc = 0.0;
      for (int r = 0; r < m; ++r) {
        out[base + std::int64_t(r) * cols + c] = acc;
        acc += in[base + std::int64_t(r) * cols + c];
      }
    }
  }
}

void block_cumsum_exclusive(const double* in, double* out, int rows, int cols, int m) {
  const int blocks = rows / m;
  if (!parallel_enabled() || std::int64_t(rows) * cols < kParallelGrain) {
    block_cumsum_exclusive_serial(in, out, rows, cols, m);
    return;
  }
#pragma omp parallel for schedule(static)
  for (int blk = 0; blk < blocks; ++blk) {
    const std::int64_t base = std::int64_t(blk) * m * cols;
    for (int c = 0; c < cols; ++c) {
      double acc = 0.0;
      for (int r = 0; r < m; ++r) {
        out[base + std::int64_t(r) * cols + c] = acc;
        acc += in[base + std::int64_t(r) * cols + c];
      }
    }
  }
}

void block_suffix_sum_add_serial(const double* dout, double* din, int rows, int cols, int m) {
  const int blocks = rows / m;
  for (int blk = 0; blk < blocks; ++blk) {
    const std::int64_t base = std::int64_t(blk) * m * cols;
    for (int c = 0; c < cols; ++c) {
      double acc = 0.0;
      for (int r = m - 1; r >= 0; --r) {
        din[base + std::int64_t(r) * cols + c] += acc;
        acc += dout[base + std::int64_t(r) * cols + c];
      }
    }
  }
}

void block_suffix_sum_add(const double* dout, double* din, int rows, int cols, int m) {
  const int blocks = rows / m;
  if (!parallel_enabled() || std::int64_t(rows) * cols < kParallelGrain) {
    block_suffix_sum_add_serial(dout, din, rows, cols, m);
    return;
  }
#pragma omp parallel for schedule(static)
  for (int blk = 0; blk < blocks; ++blk) {
    const std::int64_t base = std::int64_t(blk) * m * cols;
    for (int c = 0; c < cols; ++c) {
      double acc = 0.0;
      for (int r = m - 1; r >= 0; --r) {
        din[base + std::int64_t(r) * cols + c] += acc;
        acc += dout[base + std::int64_t(r) * cols + c];
      }
    }
  }
}

void block_sum_serial(const double* in, double* out, int blocks, int m, int cols) {
  for (int blk = 0; blk < blocks; ++blk) {
    double* o = out + std::int64_t(blk) * cols;
    std::memset(o, 0, sizeof(double) * cols);
    const double* base = in + std::int64_t(blk) * m * cols;
    for (int r = 0; r < m; ++r) {
      const double* row = base + std::int64_t(r) * cols;
      for (int c = 0; c < cols; ++c) o[c] += row[c];
    }
  }
}

void block_sum(const double* in, double* out, int blocks, int m, int cols) {
  if (!parallel_enabled() || std::int64_t(blocks) * m * cols < kParallelGrain) {
    block_sum_serial(in, out, blocks, m, cols);
    return;
  }
#pragma omp parallel for schedule(static)
  for (int blk = 0; blk < blocks; ++blk) {
    double* o = out + std::int64_t(blk) * cols;
    std::memset(o, 0, sizeof(double) * cols);
    const double* base = in + std::int64_t(blk) * m * cols;
    for (int r = 0; r < m; ++r) {
      const double* row = base + std::int64_t(r) * cols;
      for (int c = 0; c < cols; ++c) o[c] += row[c];
    }
  }
}

void block_expand_serial(const double* in, double* out, int blocks, int m, int cols) {
  for (int blk = 0; blk < blocks; ++blk) {
    const double* row = in + std::int64_t(blk) * cols;
    double* base = out + std::int64_t(blk) * m * cols;
    for (int r = 0; r < m; ++r)
      std::memcpy(base + std::int64_t(r) * cols, row, sizeof(double) * cols);
  }
}

void block_expand(const double* in, double* out, int blocks, int m, int cols) {
  if (!parallel_enabled() || std::int64_t(blocks) * m * cols < kParallelGrain) {
    block_expand_serial(in, out, blocks, m, cols);
    return;
  }
#pragma omp parallel for schedule(static)
  for (int blk = 0; blk < blocks; ++blk) {
    const double* row = in + std::int64_t(blk) * cols;
    double* base = out + std::int64_t(blk) * m * cols;
    for (int r = 0; r < m; ++r)
      std::memcpy(base + std::int64_t(r) * cols, row, sizeof(double) * cols);
  }
}

double sum_serial(const double* x, std::int64_t n) {
  double acc = 0.0;
  for (std::int64_t i = 0; i < n; ++i) acc += x[i];
  return acc;
}

}  // namespace blurf::kernels
