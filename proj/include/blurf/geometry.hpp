// Copyright (c) 2026 The blurf Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <stdexcept>

namespace blurf {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Rigid camera-to-world transform: x_world = rotation * x_cam + translation.
struct Pose {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  Pose() = default;
  Pose(const Mat3& r, const Vec3& t) : rotation(r), translation(t) {}

  Pose inverse() const { return Pose(rotation.transpose(), -(rotation.transpose() * translation)); }
  Pose operator*(const Pose& o) const {
    return Pose(rotation * o.rotation, rotation * o.translation + translation);
  }
  Vec3 apply(const Vec3& x) const { return rotation * x + translation; }
};

/// se(3) element: axis-angle rotation part and translation part.
struct Twist {
  Vec3 omega = Vec3::Zero();
  Vec3 v = Vec3::Zero();
};

struct Camera {
  double fx = 1.0, fy = 1.0, cx = 0.0, cy = 0.0;
  int width = 1, height = 1;
  double near_s = 0.1, far_s = 10.0;
};

struct Ray {
  Vec3 origin = Vec3::Zero();
  Vec3 direction = Vec3::UnitZ();
  int row = 0, col = 0;
  int frame = 1;      // 1-based
  int timestamp = 1;  // 1-based intra-exposure index
};

Mat3 skew(const Vec3& w);

/// Rodrigues exponential; series branch below 1e-6 rad.
Mat3 so3_exp(const Vec3& omega);
/// Rotation log; throws at exactly pi ("log branch undefined").
Vec3 so3_log(const Mat3& r);

Pose se3_exp(const Twist& t);
Twist se3_log(const Pose& p);

/// Pose at the l-th of n exposure timestamps, endpoint-inclusive:
/// p_start * exp(((l-1)/(n-1)) * log(p_start^-1 * p_end)). Left-relative:
/// the geodesic is anchored at the start pose.
Pose interpolate_pose(const Pose& p_start, const Pose& p_end, int l, int n);

/// Same geodesic at an arbitrary fraction alpha in [0, 1].
Pose interpolate_pose_alpha(const Pose& p_start, const Pose& p_end, double alpha);

/// Ray through integer pixel (row, col): origin at the camera center,
/// direction = normalize(R * ((col-cx)/fx, (row-cy)/fy, 1)).
Ray pixel_ray(const Camera& cam, const Pose& pose, int row, int col);
/// Sub-pixel variant used by the synthetic rasterizer.
Ray pixel_ray_f(const Camera& cam, const Pose& pose, double row, double col);

/// Projects a world point into the image plane of `pose`; returns (col, row).
Eigen::Vector2d project(const Camera& cam, const Pose& pose, const Vec3& x_world);

/// Renormalizes the rotation via SVD; used after long interpolation chains.
Mat3 orthonormalize(const Mat3& r);

}  // namespace blurf
