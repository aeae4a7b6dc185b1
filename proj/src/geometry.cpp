// Copyright (c) 2026 The blurf Authors.
// SPDX-License-Identifier: Apache-2.0
#include "blurf/geometry.hpp"

#include <cmath>

namespace blurf {

namespace {
constexpr double kSmallAngle = 1e-6;
}

Mat3 skew(const Vec3& w) {
  Mat3 s;
  s << 0.0, -w.z(), w.y(), w.z(), 0.0, -w.x(), -w.y(), w.x(), 0.0;
  return s;
}

Mat3 so3_exp(const Vec3& omega) {
  const double theta2 = omega.squaredNorm();
  const Mat3 k = skew(omega);
  double a, b;
  if (theta2 < kSmallAngle * kSmallAngle) {
    // 2nd-order series in theta^2
    a = 1.0 - theta2 / 6.0 + theta2 * theta2 / 120.0;
    b = 0.5 - theta2 / 24.0 + theta2 * theta2 / 720.0;
  } else {
    const double theta = std::sqrt(theta2);
    a = std::sin(theta) / theta;
    b = (1.0 - std::cos(theta)) / theta2;
  }
  return Mat3::Identity() + a * k + b * (k * k);
}

Vec3 so3_log(const Mat3& r) {
  const Vec3 w_raw(0.5 * (r(2, 1) - r(1, 2)), 0.5 * (r(0, 2) - r(2, 0)), 0.5 * (r(1, 0) - r(0, 1)));
  const double s = w_raw.norm();                       // sin(theta)
  const double c = 0.5 * (r.trace() - 1.0);            // cos(theta)
  if (c < -1.0 + 1e-12 && s < 1e-6) throw std::domain_error("log branch undefined");
  const double theta = std::atan2(s, c);
  if (theta < kSmallAngle) {
    // theta/sin(theta) -> 1 + theta^2/6 with theta^2 ~ s^2 here
    const double gamma = 1.0 + s * s / 6.0;
    return gamma * w_raw;
  }
  return (theta / s) * w_raw;
}

Pose se3_exp(const Twist& t) {
  const double theta2 = t.omega.squaredNorm();
  const Mat3 k = skew(t.omega);
  double b, cc;
  if (theta2 < kSmallAngle * kSmallAngle) {
    b = 0.5 - theta2 / 24.0 + theta2 * theta2 / 720.0;
    cc = 1.0 / 6.0 - theta2 / 120.0 + theta2 * theta2 / 5040.0;
  } else {
    const double theta = std::sqrt(theta2);
    const double a = std::sin(theta) / theta;
    b = (1.0 - std::cos(theta)) / theta2;
    cc = (1.0 - a) / theta2;
  }
  const Mat3 v_mat = Mat3::Identity() + b * k + cc * (k * k);
  return Pose(so3_exp(t.omega), v_mat * t.v);
}

Twist se3_log(const Pose& p) {
  Twist t;
  t.omega = so3_log(p.rotation);
  const double theta2 = t.omega.squaredNorm();
  const Mat3 k = skew(t.omega);
  double d;
  if (theta2 < kSmallAngle * kSmallAngle) {
    d = 1.0 / 12.0 + theta2 / 720.0 + theta2 * theta2 / 30240.0;
  } else {
    const double theta = std::sqrt(theta2);
    const double a = std::sin(theta) / theta;
    const double b = (1.0 - std::cos(theta)) / theta2;
    d = (1.0 - a / (2.0 * b)) / theta2;
  }
  const Mat3 v_inv = Mat3::Identity() - 0.5 * k + d * (k * k);
  t.v = v_inv * p.translation;
  return t;
}

Pose interpolate_pose_alpha(const Pose& p_start, const Pose& p_end, double alpha) {
  const Twist rel = se3_log(p_start.inverse() * p_end);
  Twist scaled;
  scaled.omega = alpha * rel.omega;
  scaled.v = alpha * rel.v;
  return p_start * se3_exp(scaled);
}

Pose interpolate_pose(const Pose& p_start, const Pose& p_end, int l, int n) {
  if (n < 1) throw std::invalid_argument("interpolate_pose: n must be >= 1");
  if (l < 1 || l > n) throw std::out_of_range("interpolate_pose: timestamp index out of range");
  if (n == 1) return p_start;
  if (l == 1) return p_start;
  if (l == n) return p_end;
  return interpolate_pose_alpha(p_start, p_end, double(l - 1) / double(n - 1));
}

Ray pixel_ray_f(const Camera& cam, const Pose& pose, double row, double col) {
  Ray r;
  r.origin = pose.translation;
  const Vec3 d_cam((col - cam.cx) / cam.fx, (row - cam.cy) / cam.fy, 1.0);
  r.direction = (pose.rotation * d_cam).normalized();
  r.row = int(std::lround(row));
  r.col = int(std::lround(col));
  return r;
}

Ray pixel_ray(const Camera& cam, const Pose& pose, int row, int col) {
  if (row < 0 || row >= cam.height || col < 0 || col >= cam.width)
    throw std::out_of_range("pixel_ray: pixel outside image");
  return pixel_ray_f(cam, pose, double(row), double(col));
}

Eigen::Vector2d project(const Camera& cam, const Pose& pose, const Vec3& x_world) {
  const Vec3 xc = pose.rotation.transpose() * (x_world - pose.translation);
  return {cam.fx * xc.x() / xc.z() + cam.cx, cam.fy * xc.y() / xc.z() + cam.cy};
}

Mat3 orthonormalize(const Mat3& r) {
  Eigen::JacobiSVD<Mat3> svd(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 out = svd.matrixU() * svd.matrixV().transpose();
  if (out.determinant() < 0.0) {
    Mat3 flip = Mat3::Identity();
    flip(2, 2) = -1.0;
    out = svd.matrixU() * flip * svd.matrixV().transpose();
  }
  return out;
}

}  // namespace blurf
