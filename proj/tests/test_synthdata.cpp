// Copyright (c) 2026 The blurf Authors.
// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "blurf/synthdata.hpp"
#include "blurf/util.hpp"

using namespace blurf;

namespace {

SceneScript small_scene() {
  SceneScript s = tiny_static_script();
  s.width = 24;
  s.height = 16;
  s.fx = s.fy = 22.0;
  return s;
}

}  // namespace

TEST_CASE("raster: empty scene shows the background everywhere") {
  SceneScript s = small_scene();
  const RasterResult r = raster_sharp(s, 0.5);
  for (int row = 0; row < s.height; ++row)
    for (int col = 0; col < s.width; ++col) {
      CHECK(r.mask.at(row, col) == 0.0);
      CHECK(r.depth.at(row, col) >= s.bg_depth - 1e-9);
    }
}

TEST_CASE("raster: centered box owns the center pixel with its depth") {
  SceneScript s = small_scene();
  s.campath = CameraPathSpec{};  // static camera at the origin
  MoverSpec m;
  m.half = Vec3(0.4, 0.4, 0.05);
  m.p0 = Vec3(0.0, 0.0, 4.0);
  s.movers.push_back(m);
  const RasterResult r = raster_sharp(s, 0.5);
  const int cr = s.height / 2, cc = s.width / 2;
  CHECK(r.mask.at(cr, cc) == 1.0);
  // front face sits at z = 3.95; depth is the distance along the pixel ray
  const Ray ray = pixel_ray(s.camera(), s.campath.pose(0.5), cr, cc);
  CHECK(r.depth.at(cr, cc) == doctest::Approx(3.95 / ray.direction.z()).epsilon(1e-9));
}

TEST_CASE("raster: mover outside the frustum matches the empty scene") {
  SceneScript empty = small_scene();
  SceneScript with = small_scene();
  MoverSpec m;
  m.p0 = Vec3(50.0, 0.0, 4.0);  // far off screen
  with.movers.push_back(m);
  const RasterResult a = raster_sharp(empty, 0.3);
  const RasterResult b = raster_sharp(with, 0.3);
  CHECK(a.color.data == b.color.data);
  CHECK(a.mask.data == b.mask.data);
}

TEST_CASE("blur: static scene is blur-free and S=1 is a single raster") {
  SceneScript s = small_scene();
  s.campath = CameraPathSpec{};
  const Image blurry = make_blurry(s, 2);
  const RasterResult sharp = raster_sharp(s, s.frame_center(2));
  double err = 0.0;
  for (std::size_t i = 0; i < blurry.data.size(); ++i)
    err = std::max(err, std::fabs(blurry.data[i] - sharp.color.data[i]));
  CHECK(err < 1e-12);

  SceneScript s1 = small_scene();
  s1.substeps = 1;
  MoverSpec m;
  m.p0 = Vec3(-0.2, 0.0, 4.0);
  m.vel = Vec3(1.0, 0.0, 0.0);
  s1.movers.push_back(m);
  const Image b1 = make_blurry(s1, 2);
  const RasterResult mid = raster_sharp(s1, s1.frame_center(2));
  CHECK(b1.data == mid.color.data);
}

TEST_CASE("blur converges as the substep count approaches S on the shipped scripts") {
  for (const char* name : {"moving-square", "two-movers"}) {
    SceneScript s = script_by_name(name);
    s.substeps = 21;
    const Image ref = make_blurry(s, 5);
    double prev = 1e9;
    for (int sub : {3, 5, 11, 21}) {  // nested sample grids of the S=21 ladder
      SceneScript sn = s;
      sn.substeps = sub;
      const Image bn = make_blurry(sn, 5);
      double err = 0.0;
      for (std::size_t i = 0; i < ref.data.size(); ++i)
        err = std::max(err, std::fabs(ref.data[i] - bn.data[i]));
      CHECK(err <= prev * 1.02 + 1e-12);
      prev = err;
    }
    CHECK(prev == 0.0);  // sub == S reproduces the reference exactly
  }
}

TEST_CASE("gt flow: static world and static camera give zero flow") {
  SceneScript s = small_scene();
  s.campath = CameraPathSpec{};
  const Image f = gt_flow(s, 1, 2);
  for (double v : f.data) CHECK(std::fabs(v) < 1e-9);
}

TEST_CASE("gt flow: camera translation over the background is the projected shift") {
  SceneScript s = small_scene();
  s.campath.t0 = Vec3::Zero();
  s.campath.vel = Vec3(0.3, 0.0, 0.0);
  s.campath.rot_rate = 0.0;
  const Image f = gt_flow(s, 1, 1);
  // camera moves +x by vel/frames between matching timestamps; the background
  // at depth z shifts by -fx * dx / z pixels
  const double dx = 0.3 / double(s.frames);
  const double expect = -s.fx * dx / s.bg_depth;
  for (int row = 2; row < s.height - 2; ++row)
    for (int col = 2; col < s.width - 2; ++col) {
      CHECK(f.at(row, col, 0) == doctest::Approx(expect).epsilon(1e-9));
      CHECK(std::fabs(f.at(row, col, 1)) < 1e-9);
    }
}

TEST_CASE("gt flow: mover pixels differ from background pixels") {
  SceneScript s = small_scene();
  s.campath = CameraPathSpec{};
  MoverSpec m;
  m.half = Vec3(0.3, 0.3, 0.05);
  m.p0 = Vec3(0.0, 0.0, 4.0);
  m.vel = Vec3(0.8, 0.0, 0.0);
  s.movers.push_back(m);
  const Image f = gt_flow(s, 1, 1);
  const RasterResult r = raster_sharp(s, s.timestamp_time(1, 1));
  const int cr = s.height / 2;
  int mover_col = -1, bg_col = -1;
  for (int col = 0; col < s.width; ++col) {
    if (r.mask.at(cr, col) > 0.5 && mover_col < 0) mover_col = col;
    if (r.mask.at(cr, col) < 0.5 && col > 1) bg_col = col;
  }
  REQUIRE(mover_col >= 0);
  REQUIRE(bg_col >= 0);
  CHECK(std::fabs(f.at(cr, mover_col, 0)) > 1e-3);
  CHECK(std::fabs(f.at(cr, bg_col, 0)) < 1e-9);
}

TEST_CASE("prior depth respects extreme-value semantics at mover edges") {
  SceneScript s = small_scene();
  s.campath = CameraPathSpec{};
  MoverSpec m;
  m.half = Vec3(0.3, 0.3, 0.05);
  m.p0 = Vec3(-0.35, 0.0, 4.0);
  m.vel = Vec3(2.4, 0.0, 0.0);  // sweeps across during the video
  s.movers.push_back(m);
  const FrameData fd = generate_frame(s, 2);
  const int cr = s.height / 2;
  const double bg = s.bg_depth;
  // every pixel covered by the mover at any timestamp reports the mover depth
  bool found_edge = false;
  for (int col = 0; col < s.width; ++col) {
    bool covered = false;
    for (int l = 1; l <= s.n; ++l) {
      const RasterResult r = raster_sharp(s, s.timestamp_time(2, l));
      covered = covered || r.mask.at(cr, col) > 0.5;
    }
    if (covered) {
      CHECK(fd.depth_prior.at(cr, col) < bg - 1.0);
      found_edge = true;
    }
  }
  CHECK(found_edge);
}

TEST_CASE("manifest round trip preserves poses, images, and priors") {
  namespace fs = std::filesystem;
  const std::string dir = fs::temp_directory_path() / "blurf_test_dataset";
  fs::remove_all(dir);
  SceneScript s = small_scene();
  MoverSpec m;
  m.p0 = Vec3(0.0, 0.0, 4.0);
  m.vel = Vec3(0.5, 0.0, 0.0);
  s.movers.push_back(m);
  generate_dataset(s, dir);
  const Dataset ds = load_dataset(dir);
  REQUIRE(ds.frames == s.frames);
  REQUIRE(ds.n == s.n);

  for (int i = 1; i <= s.frames; ++i) {
    const FrameData fresh = generate_frame(s, i);
    const FrameData& loaded = ds.data[std::size_t(i - 1)];
    CHECK((fresh.pose_start.rotation - loaded.pose_start.rotation).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((fresh.pose_end.translation - loaded.pose_end.translation).cwiseAbs().maxCoeff() < 1e-12);
    // blurry PNG round trip quantizes to 8 bits
    double err = 0.0;
    for (std::size_t k = 0; k < fresh.blurry.data.size(); ++k)
      err = std::max(err, std::fabs(fresh.blurry.data[k] - loaded.blurry.data[k]));
    CHECK(err <= 0.5 / 255.0 + 1e-9);
    // depth prior PFM round trip is float32-exact
    err = 0.0;
    for (std::size_t k = 0; k < fresh.depth_prior.data.size(); ++k)
      err = std::max(err, std::fabs(fresh.depth_prior.data[k] - loaded.depth_prior.data[k]));
    CHECK(err < 1e-6);
    CHECK(fresh.flow_prior.has_value() == loaded.flow_prior.has_value());
  }
  fs::remove_all(dir);
}

TEST_CASE("script JSON round trip") {
  const SceneScript s = two_movers_script();
  const SceneScript t = script_from_json(script_to_json(s));
  CHECK(t.name == s.name);
  CHECK(t.movers.size() == s.movers.size());
  CHECK(t.movers[1].p0 == s.movers[1].p0);
  CHECK(t.campath.rot_rate == s.campath.rot_rate);
  CHECK(t.exposure_fraction == s.exposure_fraction);
}

TEST_CASE("corrupted priors spread the foreground outward") {
  SceneScript s = small_scene();
  s.campath = CameraPathSpec{};
  MoverSpec m;
  m.half = Vec3(0.25, 0.25, 0.05);
  m.p0 = Vec3(0.0, 0.0, 4.0);
  s.movers.push_back(m);
  const FrameData clean = generate_frame(s, 2);
  s.corrupt_priors = true;
  s.corrupt_radius = 2;
  const FrameData fat = generate_frame(s, 2);
  int clean_fg = 0, fat_fg = 0;
  for (std::size_t k = 0; k < clean.depth_prior.data.size(); ++k) {
    clean_fg += clean.depth_prior.data[k] < 5.0 ? 1 : 0;
    fat_fg += fat.depth_prior.data[k] < 5.0 ? 1 : 0;
    CHECK(fat.depth_prior.data[k] <= clean.depth_prior.data[k] + 1e-12);
  }
  CHECK(fat_fg > clean_fg);
}
