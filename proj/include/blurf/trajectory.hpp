// Copyright (c) 2026 The blurf Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <vector>

#include "blurf/tensor.hpp"

namespace blurf {

/// Frame/timestamp pair with its flattened global index. Frames and intra-
/// exposure timestamps are 1-based; the flattened index t = (i-1)*n + (l-1)
/// runs over [0, n*N).
struct TimeIndex {
  int frame = 1;
  int timestamp = 1;

  static TimeIndex make(int frame, int timestamp) { return {frame, timestamp}; }
  int flat(int n) const { return (frame - 1) * n + (timestamp - 1); }
};

/// Cosine motion basis over all n*N timestamps. The closed-form table holds
/// cos(pi/(2*n*N) * (2t+1) * k) for k in [1, K]; when learnable, the table is
/// a trainable parameter initialized to the same values. The sqrt(2/(nN))
/// normalization is applied at evaluation so fixed and learnable tables are
/// interchangeable.
struct DctBasis {
  int n = 1;
  int N = 1;
  int K = 1;
  bool learnable = false;
  std::vector<double> table;  // (n*N) x K, row-major

  int total_timestamps() const { return n * N; }
  double entry(int t, int k) const { return table[std::size_t(t) * K + (k - 1)]; }  // k is 1-based
  double norm_factor() const { return std::sqrt(2.0 / double(n * N)); }
};

DctBasis make_dct_basis(int n, int N, int K);
DctBasis init_learnable_basis(int n, int N, int K);

/// K x 3 coefficient block; column a holds the K coefficients of axis a.
using DctCoefficients = Eigen::MatrixXd;

/// T(t) = sqrt(2/(nN)) * sum_k psi(k) * basis[t][k].
Eigen::Vector3d eval_trajectory(const DctCoefficients& psi, const DctBasis& basis, TimeIndex t);

/// T(to) - T(from) for a shared coefficient block.
Eigen::Vector3d scene_flow(const DctCoefficients& psi, const DctBasis& basis, TimeIndex from,
                           TimeIndex to);

Eigen::Vector3d warp_point(const Eigen::Vector3d& x, const DctCoefficients& psi,
                           const DctBasis& basis, TimeIndex from, TimeIndex to);

/// Graph evaluation of per-sample scene flow. `psi` is (R x 3K) with axis-
/// major column layout [x:k=1..K | y | z]; `basis_rows` is the (nN x K) basis
/// tensor (trainable or constant). Returns (R x 3).
Tensor scene_flow_graph(Tensor psi, Tensor basis_rows, const DctBasis& meta, int t_from, int t_to);

}  // namespace blurf
