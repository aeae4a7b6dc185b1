// Copyright (c) 2026 The blurf Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "blurf/geometry.hpp"
#include "blurf/tensor.hpp"

namespace blurf {

/// Pose as tape tensors: rotation (3x3) applied to column vectors, and a
/// (1x3) translation row. Trainable camera parameters enter the graph as
/// start/end twists applied to fixed initial poses, so every gradient flows
/// through the exponential map.
struct PoseNodes {
  Tensor rotation;     // 3x3
  Tensor translation;  // 1x3
};

PoseNodes pose_constant(Tape& tape, const Pose& p);

/// Skew matrix of a (1x3) row as a (3x3) tensor.
Tensor skew_graph(Tensor w_row);

/// exp of a (1x6) twist [omega, v]; series branch matching geometry.cpp.
PoseNodes pose_exp_graph(Tensor twist);

/// log as a (1x6) twist. Valid for rotation angles in (0, pi); uses the
/// atan2(sin, cos) form with a series branch near zero.
Tensor pose_log_graph(const PoseNodes& p);

PoseNodes pose_compose(const PoseNodes& a, const PoseNodes& b);
PoseNodes pose_inverse(const PoseNodes& p);

/// a * exp(alpha * log(a^-1 * b)) with constant alpha.
PoseNodes pose_interpolate_graph(const PoseNodes& a, const PoseNodes& b, double alpha);

/// Applies the pose to a batch of points (R x 3 rows): x * R^T + t.
Tensor pose_apply(const PoseNodes& p, Tensor points);

/// Rotates row vectors without translating: d * R^T.
Tensor pose_rotate(const PoseNodes& p, Tensor dirs);

/// Extracts plain values for checkpoint or rendering bookkeeping.
Pose pose_values(const PoseNodes& p);

}  // namespace blurf
