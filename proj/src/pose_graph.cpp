// Copyright (c) 2026 The blurf Authors.
// SPDX-License-Identifier: Apache-2.0
#include "blurf/pose_graph.hpp"

#include <cmath>

namespace blurf {

namespace {

constexpr double kSmallAngle2 = 1e-12;  // theta^2 threshold for series branches

// Constant matrices for linmap-built skew/vee/trace forms, all row-major.
// skew: (1x3) omega -> flattened 3x3 [0,-z,y; z,0,-x; -y,x,0]
const std::vector<double> kSkewMap = {
    0, 0, 0,   0, 0, -1,  0, 1, 0,
    0, 0, 1,   0, 0, 0,   -1, 0, 0,
    0, -1, 0,  1, 0, 0,   0, 0, 0,
};

// vee of (A - A^T)/2 restricted to our use: maps flattened 3x3 -> (1x3)
// [ (a21-a12)/2, (a02-a20)/2, (a10-a01)/2 ]
const std::vector<double> kHalfVeeMap = {
    0, 0, 0,  0, 0, -0.5, 0, 0.5, 0,
    0, 0, 0.5, 0, 0, 0,  -0.5, 0, 0,
    0, -0.5, 0, 0.5, 0, 0, 0, 0, 0,
};

// trace: flattened 3x3 -> (1x1)
const std::vector<double> kTraceMap = {1, 0, 0, 0, 1, 0, 0, 0, 1};

Tensor identity3(Tape& tape) {
  return tape.constant({3, 3}, {1, 0, 0, 0, 1, 0, 0, 0, 1});
}

// Evaluates a truncated even series c0 + c1*u + c2*u^2 on a scalar tensor.
Tensor series3(Tensor u, double c0, double c1, double c2) {
  Tensor acc = add_c(mul_c(u, c1), c0);
  return add(acc, mul_c(mul(u, u), c2));
}

}  // namespace

PoseNodes pose_constant(Tape& tape, const Pose& p) {
  std::vector<double> r(9);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r[std::size_t(i) * 3 + j] = p.rotation(i, j);
  PoseNodes out;
  out.rotation = tape.constant({3, 3}, r);
  out.translation = tape.constant({1, 3}, {p.translation.x(), p.translation.y(), p.translation.z()});
  return out;
}

Tensor skew_graph(Tensor w_row) { return linmap(kSkewMap, {3, 3}, w_row); }

PoseNodes pose_exp_graph(Tensor twist) {
  if (twist.shape().rows != 1 || twist.shape().cols != 6)
    throw std::invalid_argument("pose_exp_graph: twist must be 1x6");
  Tape& tape = *twist.tape;
  Tensor omega = slice_cols(twist, 0, 3);
  Tensor v = slice_cols(twist, 3, 6);
  Tensor u = row_sum(mul(omega, omega));  // theta^2, 1x1

  Tensor a, b, c;
  if (u.val()[0] < kSmallAngle2) {
    a = series3(u, 1.0, -1.0 / 6.0, 1.0 / 120.0);
    b = series3(u, 0.5, -1.0 / 24.0, 1.0 / 720.0);
    c = series3(u, 1.0 / 6.0, -1.0 / 120.0, 1.0 / 5040.0);
  } else {
    Tensor theta = sqrt_t(u);
    a = div(sin_t(theta), theta);
    b = div(add_c(neg(cos_t(theta)), 1.0), u);
    c = div(add_c(neg(a), 1.0), u);
  }

  Tensor k = skew_graph(omega);
  Tensor k2 = matmul(k, k);
  Tensor eye = identity3(tape);
  PoseNodes out;
  out.rotation = add(eye, add(scale_by(k, a), scale_by(k2, b)));
  Tensor v_mat = add(eye, add(scale_by(k, b), scale_by(k2, c)));
  out.translation = matmul(v, transpose(v_mat));  // row form of V * v
  return out;
}

Tensor pose_log_graph(const PoseNodes& p) {
  Tensor r_flat = reshape(p.rotation, {1, 9});
  Tensor w_raw = linmap(kHalfVeeMap, {1, 3}, r_flat);          // sin(theta) * axis
  Tensor s2 = row_sum(mul(w_raw, w_raw));                      // sin^2(theta)
  Tensor cos_th = mul_c(add_c(linmap(kTraceMap, {1, 1}, r_flat), -1.0), 0.5);

  Tensor gamma;  // theta / sin(theta)
  if (s2.val()[0] < kSmallAngle2 && cos_th.val()[0] > 0.0) {
    // theta^2 = s2 * (1 + s2/3) to the order needed here
    Tensor u = mul(s2, series3(s2, 1.0, 1.0 / 3.0, 0.0));
    gamma = series3(u, 1.0, 1.0 / 6.0, 7.0 / 360.0);
  } else {
    Tensor sin_th = sqrt_t(s2);
    Tensor theta = atan2_t(sin_th, cos_th);
    gamma = div(theta, sin_th);
  }
  Tensor omega = scale_by(w_raw, gamma);

  Tensor u2 = row_sum(mul(omega, omega));  // theta^2
  Tensor d;
  if (u2.val()[0] < kSmallAngle2) {
    d = series3(u2, 1.0 / 12.0, 1.0 / 720.0, 1.0 / 30240.0);
  } else {
    Tensor theta = sqrt_t(u2);
    Tensor a = div(sin_t(theta), theta);
    Tensor b = div(add_c(neg(cos_t(theta)), 1.0), u2);
    d = div(add_c(neg(div(a, mul_c(b, 2.0))), 1.0), u2);
  }
  Tensor k = skew_graph(omega);
  Tensor k2 = matmul(k, k);
  Tensor eye = identity3(*omega.tape);
  Tensor v_inv = add(eye, add(mul_c(k, -0.5), scale_by(k2, d)));
  Tensor v = matmul(p.translation, transpose(v_inv));
  return concat_cols({omega, v});
}

PoseNodes pose_compose(const PoseNodes& a, const PoseNodes& b) {
  PoseNodes out;
  out.rotation = matmul(a.rotation, b.rotation);
  out.translation = add(matmul(b.translation, transpose(a.rotation)), a.translation);
  return out;
}

PoseNodes pose_inverse(const PoseNodes& p) {
  PoseNodes out;
  out.rotation = transpose(p.rotation);
  out.translation = neg(matmul(p.translation, p.rotation));
  return out;
}

PoseNodes pose_interpolate_graph(const PoseNodes& a, const PoseNodes& b, double alpha) {
  Tensor rel = pose_log_graph(pose_compose(pose_inverse(a), b));
  return pose_compose(a, pose_exp_graph(mul_c(rel, alpha)));
}

Tensor pose_apply(const PoseNodes& p, Tensor points) {
  Tensor rotated = matmul(points, transpose(p.rotation));
  return add_rowvec(rotated, p.translation);
}

Tensor pose_rotate(const PoseNodes& p, Tensor dirs) { return matmul(dirs, transpose(p.rotation)); }

Pose pose_values(const PoseNodes& p) {
  Pose out;
  const auto& r = p.rotation.val();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) out.rotation(i, j) = r[std::size_t(i) * 3 + j];
  const auto& t = p.translation.val();
  out.translation = Vec3(t[0], t[1], t[2]);
  return out;
}

}  // namespace blurf
