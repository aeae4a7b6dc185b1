// Copyright (c) 2026 The blurf Authors.
// SPDX-License-Identifier: Apache-2.0
#include "blurf/trajectory.hpp"

#include <cmath>
#include <stdexcept>

namespace blurf {

DctBasis make_dct_basis(int n, int N, int K) {
  if (n < 1 || N < 1 || K < 1) throw std::invalid_argument("dct basis: n, N, K must be >= 1");
  DctBasis b;
  b.n = n;
  b.N = N;
  b.K = K;
  b.learnable = false;
  const int total = n * N;
  b.table.resize(std::size_t(total) * K);
  for (int t = 0; t < total; ++t)
    for (int k = 1; k <= K; ++k)
      b.table[std::size_t(t) * K + (k - 1)] = std::cos(M_PI / (2.0 * total) * (2.0 * t + 1.0) * k);
  return b;
}

DctBasis init_learnable_basis(int n, int N, int K) {
  DctBasis b = make_dct_basis(n, N, K);
  b.learnable = true;
  return b;
}

Eigen::Vector3d eval_trajectory(const DctCoefficients& psi, const DctBasis& basis, TimeIndex t) {
  if (psi.rows() != basis.K || psi.cols() != 3)
    throw std::invalid_argument("eval_trajectory: psi must be K x 3");
  const int flat = t.flat(basis.n);
  if (flat < 0 || flat >= basis.total_timestamps())
    throw std::out_of_range("eval_trajectory: timestamp out of range");
  Eigen::Vector3d out = Eigen::Vector3d::Zero();
  for (int k = 1; k <= basis.K; ++k) out += psi.row(k - 1).transpose() * basis.entry(flat, k);
  return basis.norm_factor() * out;
}

Eigen::Vector3d scene_flow(const DctCoefficients& psi, const DctBasis& basis, TimeIndex from,
                           TimeIndex to) {
  return eval_trajectory(psi, basis, to) - eval_trajectory(psi, basis, from);
}

Eigen::Vector3d warp_point(const Eigen::Vector3d& x, const DctCoefficients& psi,
                           const DctBasis& basis, TimeIndex from, TimeIndex to) {
  return x + scene_flow(psi, basis, from, to);
}

Tensor scene_flow_graph(Tensor psi, Tensor basis_rows, const DctBasis& meta, int t_from, int t_to) {
  const int K = meta.K;
  if (psi.shape().cols != 3 * K) throw std::invalid_argument("scene_flow_graph: psi must be R x 3K");
  const int total = meta.total_timestamps();
  if (t_from < 0 || t_from >= total || t_to < 0 || t_to >= total)
    throw std::out_of_range("scene_flow_graph: timestamp out of range");
  // (b[t_to] - b[t_from]) as a K x 1 column
  Tensor diff = transpose(sub(slice_rows(basis_rows, t_to, t_to + 1),
                              slice_rows(basis_rows, t_from, t_from + 1)));
  std::vector<Tensor> axes;
  axes.reserve(3);
  for (int a = 0; a < 3; ++a) axes.push_back(matmul(slice_cols(psi, a * K, (a + 1) * K), diff));
  return mul_c(concat_cols(axes), meta.norm_factor());
}

}  // namespace blurf
