// Copyright (c) 2026 The blurf Authors.
// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "blurf/geometry.hpp"
#include "blurf/pose_graph.hpp"
#include "blurf/util.hpp"

using namespace blurf;

namespace {

Pose random_pose(Rng& rng, double max_angle) {
  Vec3 axis(rng.normal(), rng.normal(), rng.normal());
  axis.normalize();
  Twist t;
  t.omega = axis * rng.uniform(0.0, max_angle);
  t.v = Vec3(rng.normal(), rng.normal(), rng.normal());
  return se3_exp(t);
}

double pose_diff(const Pose& a, const Pose& b) {
  return std::max((a.rotation - b.rotation).cwiseAbs().maxCoeff(),
                  (a.translation - b.translation).cwiseAbs().maxCoeff());
}

}  // namespace

TEST_CASE("se3_log: identity pose gives the zero twist") {
  const Twist t = se3_log(Pose{});
  CHECK(t.omega.norm() == doctest::Approx(0.0));
  CHECK(t.v.norm() == doctest::Approx(0.0));
}

TEST_CASE("se3_log: pure translation passes through") {
  Pose p;
  p.translation = Vec3(1, 2, 3);
  const Twist t = se3_log(p);
  CHECK(t.omega.norm() == doctest::Approx(0.0));
  CHECK((t.v - Vec3(1, 2, 3)).norm() == doctest::Approx(0.0));
}

TEST_CASE("se3_log: quarter turn about z round-trips through exp") {
  Pose p;
  p.rotation = so3_exp(Vec3(0, 0, M_PI / 2));
  const Twist t = se3_log(p);
  CHECK(t.omega.z() == doctest::Approx(M_PI / 2).epsilon(1e-12));
  CHECK(pose_diff(se3_exp(t), p) < 1e-8);
}

TEST_CASE("se3_exp: zero twist, pure translation, and a plane rotation") {
  CHECK(pose_diff(se3_exp(Twist{}), Pose{}) == 0.0);

  Twist t;
  t.v = Vec3(1, 0, 0);
  const Pose p = se3_exp(t);
  CHECK(pose_diff(p, Pose(Mat3::Identity(), Vec3(1, 0, 0))) < 1e-15);

  Twist r;
  r.omega = Vec3(0, 0, 0.3);
  const Pose q = se3_exp(r);
  Mat3 expect;
  expect << std::cos(0.3), -std::sin(0.3), 0, std::sin(0.3), std::cos(0.3), 0, 0, 0, 1;
  CHECK((q.rotation - expect).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("se3_log rejects half-turn rotations") {
  Pose p;
  p.rotation = so3_exp(Vec3(M_PI, 0, 0));
  CHECK_THROWS_WITH_AS(se3_log(p), "log branch undefined", std::domain_error);
}

TEST_CASE("interpolate_pose endpoints and translation midpoint") {
  Rng rng(5);
  const Pose a = random_pose(rng, 2.5);
  const Pose b = random_pose(rng, 2.5);
  CHECK(pose_diff(interpolate_pose(a, b, 1, 5), a) == 0.0);
  CHECK(pose_diff(interpolate_pose(a, b, 5, 5), b) == 0.0);

  Pose s, e;
  e.translation = Vec3(2, 0, 0);
  const Pose mid = interpolate_pose(s, e, 2, 3);
  CHECK((mid.translation - Vec3(1, 0, 0)).norm() < 1e-12);

  Pose rot_end;
  rot_end.rotation = so3_exp(Vec3(0, 0, 0.4));
  const Pose third = interpolate_pose(Pose{}, rot_end, 3, 5);
  CHECK((so3_log(third.rotation) - Vec3(0, 0, 0.2)).norm() < 1e-12);
}

TEST_CASE("interpolate_pose index errors") {
  Pose a, b;
  CHECK_THROWS_AS(interpolate_pose(a, b, 2, 1), std::out_of_range);
  CHECK_THROWS_AS(interpolate_pose(a, b, 0, 4), std::out_of_range);
  CHECK(pose_diff(interpolate_pose(a, b, 1, 1), a) == 0.0);
}

TEST_CASE("exp/log roundtrip over 1000 random poses up to 3 rad") {
  Rng rng(99);
  double err = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Pose p = random_pose(rng, 3.0);
    err = std::max(err, pose_diff(se3_exp(se3_log(p)), p));
  }
  CHECK(err < 1e-8);
}

TEST_CASE("pixel_ray: principal point, hand case, and translation invariance") {
  Camera cam;
  cam.fx = cam.fy = 1.0;
  cam.cx = cam.cy = 0.0;
  cam.width = 4;
  cam.height = 4;
  const Ray center = pixel_ray(cam, Pose{}, 0, 0);
  CHECK((center.direction - Vec3(0, 0, 1)).norm() < 1e-12);

  const Ray r = pixel_ray(cam, Pose{}, 0, 1);
  CHECK((r.direction - Vec3(1, 0, 1).normalized()).norm() < 1e-12);

  Pose moved;
  moved.translation = Vec3(5, 0, 0);
  const Ray rm = pixel_ray(cam, moved, 0, 1);
  CHECK((rm.origin - Vec3(5, 0, 0)).norm() == 0.0);
  CHECK((rm.direction - r.direction).norm() == 0.0);

  CHECK_THROWS_AS(pixel_ray(cam, Pose{}, -1, 0), std::out_of_range);
  CHECK_THROWS_AS(pixel_ray(cam, Pose{}, 0, 4), std::out_of_range);
}

TEST_CASE("ray directions are unit length") {
  Camera cam;
  cam.fx = cam.fy = 50.0;
  cam.cx = 31.5;
  cam.cy = 23.5;
  cam.width = 64;
  cam.height = 48;
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    const Pose p = random_pose(rng, 2.0);
    const Ray r = pixel_ray(cam, p, rng.uniform_int(0, 47), rng.uniform_int(0, 63));
    CHECK(std::fabs(r.direction.norm() - 1.0) < 1e-9);
  }
}

TEST_CASE("geodesic consistency: two-stage equals direct interpolation") {
  Rng rng(17);
  double err = 0.0;
  for (int i = 0; i < 300; ++i) {
    const Pose a = random_pose(rng, 1.5);
    const Pose b = random_pose(rng, 1.5);
    if (so3_log((a.inverse() * b).rotation).norm() >= 3.1) continue;
    const Pose mid = interpolate_pose(a, b, 3, 5);
    err = std::max(err, pose_diff(interpolate_pose(mid, b, 2, 3), interpolate_pose(a, b, 4, 5)));
  }
  CHECK(err < 1e-8);
}

// graph-side pose math against the plain implementation

TEST_CASE("pose graph: exp/log/compose/interpolate match plain values") {
  Rng rng(23);
  double err = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    Twist tw;
    tw.omega = Vec3(rng.normal(), rng.normal(), rng.normal()) * 0.4;
    tw.v = Vec3(rng.normal(), rng.normal(), rng.normal());
    const Pose plain = se3_exp(tw);

    Tape tape;
    std::vector<double> tv = {tw.omega.x(), tw.omega.y(), tw.omega.z(), tw.v.x(), tw.v.y(), tw.v.z()};
    PoseNodes g = pose_exp_graph(tape.constant({1, 6}, tv));
    err = std::max(err, pose_diff(pose_values(g), plain));

    const Pose a = random_pose(rng, 1.2);
    const Pose b = random_pose(rng, 1.2);
    PoseNodes ga = pose_constant(tape, a);
    PoseNodes gb = pose_constant(tape, b);
    err = std::max(err, pose_diff(pose_values(pose_compose(ga, gb)), a * b));
    err = std::max(err, pose_diff(pose_values(pose_inverse(ga)), a.inverse()));

    const Twist rel = se3_log(a.inverse() * b);
    Tensor logt = pose_log_graph(pose_compose(pose_inverse(ga), gb));
    const auto& lv = logt.val();
    err = std::max(err, (Vec3(lv[0], lv[1], lv[2]) - rel.omega).cwiseAbs().maxCoeff());
    err = std::max(err, (Vec3(lv[3], lv[4], lv[5]) - rel.v).cwiseAbs().maxCoeff());

    const double alpha = rng.uniform(0.0, 1.0);
    err = std::max(err, pose_diff(pose_values(pose_interpolate_graph(ga, gb, alpha)),
                                  interpolate_pose_alpha(a, b, alpha)));
  }
  CHECK(err < 1e-10);
}

TEST_CASE("pose graph handles the zero twist and identity relative pose") {
  Tape tape;
  std::vector<double> zero(6, 0.0);
  PoseNodes g = pose_exp_graph(tape.constant({1, 6}, zero));
  CHECK(pose_diff(pose_values(g), Pose{}) == 0.0);
  // log of identity through the graph path
  Tensor lt = pose_log_graph(g);
  for (double v : lt.val()) CHECK(v == doctest::Approx(0.0));
}

TEST_CASE("pose graph gradients: interpolated pose wrt both twists") {
  Rng rng(31);
  Pose init_a = random_pose(rng, 0.8);
  Pose init_b = random_pose(rng, 0.8);
  std::vector<double> ta(6), tb(6), ga(6, 0.0), gb(6, 0.0);
  for (auto& v : ta) v = rng.uniform(-0.1, 0.1);
  for (auto& v : tb) v = rng.uniform(-0.1, 0.1);

  auto eval = [&](bool with_grad) {
    Tape tape;
    PoseNodes a = pose_compose(pose_constant(tape, init_a),
                               pose_exp_graph(tape.leaf({1, 6}, ta.data(), ga.data())));
    PoseNodes b = pose_compose(pose_constant(tape, init_b),
                               pose_exp_graph(tape.leaf({1, 6}, tb.data(), gb.data())));
    PoseNodes mid = pose_interpolate_graph(a, b, 0.37);
    Tensor score = mean_all(mul(mid.rotation, mid.rotation));
    score = add(score, mean_all(mul(mid.translation, mid.translation)));
    const double v = score.val()[0];
    if (with_grad) score.tape->backward(score);
    return v;
  };
  eval(true);
  const auto an_a = ga, an_b = gb;
  const double h = 1e-6;
  double max_rel = 0.0;
  for (int k = 0; k < 12; ++k) {
    auto& vec = k < 6 ? ta : tb;
    const int i = k % 6;
    const double saved = vec[std::size_t(i)];
    vec[std::size_t(i)] = saved + h;
    const double fp = eval(false);
    vec[std::size_t(i)] = saved - h;
    const double fm = eval(false);
    vec[std::size_t(i)] = saved;
    const double fd = (fp - fm) / (2 * h);
    const double an = k < 6 ? an_a[std::size_t(i)] : an_b[std::size_t(i)];
    max_rel = std::max(max_rel, std::fabs(fd - an) / std::max({std::fabs(fd), std::fabs(an), 1e-8}));
  }
  CHECK(max_rel < 1e-5);
}
