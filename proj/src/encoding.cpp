// Copyright (c) 2026 The blurf Authors.
// SPDX-License-Identifier: Apache-2.0
#include "blurf/encoding.hpp"

#include <cmath>
#include <stdexcept>

#include "blurf/kernels.hpp"

namespace blurf {

// Fused op: one node per embedding instead of a sin/cos pair per frequency.
// Layout per row: [x?, sin(2^0 pi x), cos(2^0 pi x), ..., cos(2^(L-1) pi x)],
// all input channels together per group. The backward pass reads the stored
// sines/cosines instead of recomputing them.
Tensor encode(Tensor x, int num_freq, bool include_input) {
  if (num_freq < 0) throw std::invalid_argument("encode: negative frequency count");
  if (num_freq == 0 && include_input) return x;
  Tape& tp = *x.tape;
  const Shape in_shape = x.shape();
  const int rows = in_shape.rows;
  const int dims = in_shape.cols;
  const int out_cols = encoding_dim(dims, num_freq, include_input);
  const bool rg = tp.node(x.id).requires_grad;
  Tensor out = tp.alloc({rows, out_cols}, rg);
  const auto& xv = x.val();
  auto& ov = tp.node(out.id).value;

  auto fill_row = [&](int r) {
    const double* in = &xv[std::size_t(r) * dims];
    double* o = &ov[std::size_t(r) * out_cols];
    int off = 0;
    if (include_input)
      for (int d = 0; d < dims; ++d) o[off++] = in[d];
    double freq = M_PI;
    for (int f = 0; f < num_freq; ++f) {
      for (int d = 0; d < dims; ++d) o[off + d] = std::sin(freq * in[d]);
      for (int d = 0; d < dims; ++d) o[off + dims + d] = std::cos(freq * in[d]);
      off += 2 * dims;
      freq *= 2.0;
    }
  };
  if (kernels::parallel_enabled() && std::int64_t(rows) * out_cols >= kernels::kParallelGrain) {
#pragma omp parallel for schedule(static)
    for (int r = 0; r < rows; ++r) fill_row(r);
  } else {
    for (int r = 0; r < rows; ++r) fill_row(r);
  }

  if (rg) {
    const int xi = x.id, oi = out.id;
    tp.node(out.id).back = [xi, oi, rows, dims, out_cols, num_freq, include_input](Tape& t) {
      const auto& g = t.node(oi).grad;
      const auto& o = t.node(oi).value;
      auto& gx = t.grad_buf(xi);
      auto back_row = [&](int r) {
        const double* gr = &g[std::size_t(r) * out_cols];
        const double* orow = &o[std::size_t(r) * out_cols];
        double* gxr = &gx[std::size_t(r) * dims];
        int off = 0;
        if (include_input) {
          for (int d = 0; d < dims; ++d) gxr[d] += gr[d];
          off = dims;
        }
        double freq = M_PI;
        for (int f = 0; f < num_freq; ++f) {
          for (int d = 0; d < dims; ++d) {
            const double s = orow[off + d];
            const double c = orow[off + dims + d];
            gxr[d] += freq * (gr[off + d] * c - gr[off + dims + d] * s);
          }
          off += 2 * dims;
          freq *= 2.0;
        }
      };
      if (kernels::parallel_enabled() && std::int64_t(rows) * out_cols >= kernels::kParallelGrain) {
#pragma omp parallel for schedule(static)
        for (int r = 0; r < rows; ++r) back_row(r);
      } else {
        for (int r = 0; r < rows; ++r) back_row(r);
      }
    };
  }
  return out;
}

std::vector<double> encode_plain(const std::vector<double>& x, int dims, int num_freq,
                                 bool include_input) {
  const int rows = int(x.size()) / dims;
  const int out_dim = encoding_dim(dims, num_freq, include_input);
  std::vector<double> out(std::size_t(rows) * out_dim);
  for (int r = 0; r < rows; ++r) {
    double* o = &out[std::size_t(r) * out_dim];
    const double* in = &x[std::size_t(r) * dims];
    int off = 0;
    if (include_input) {
      for (int d = 0; d < dims; ++d) o[off++] = in[d];
    }
    double freq = M_PI;
    for (int f = 0; f < num_freq; ++f) {
      for (int d = 0; d < dims; ++d) o[off++] = std::sin(freq * in[d]);
      for (int d = 0; d < dims; ++d) o[off++] = std::cos(freq * in[d]);
      freq *= 2.0;
    }
  }
  return out;
}

}  // namespace blurf
