// Copyright (c) 2026 The blurf Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "blurf/geometry.hpp"
#include "blurf/image.hpp"

namespace blurf {

/// Procedural texture: base + amp * g(sin(2pi (fu*u + fv*v) + phase)).
/// With edge = 0 the modulator g is the identity (pure sinusoid); edge > 0
/// sharpens it toward a square wave via tanh(edge * s) / tanh(edge), giving
/// bold stripe boundaries that motion blur visibly degrades.
struct TextureSpec {
  Vec3 base = Vec3(0.5, 0.5, 0.5);
  Vec3 amp = Vec3(0.3, 0.3, 0.3);
  double fu = 1.0;
  double fv = 0.7;
  double phase = 0.0;
  double edge = 0.0;

  Vec3 color(double u, double v) const;
};

/// Textured primitive translating along an analytic path over global time
/// in [0,1]. Movers translate rigidly (no spin), so ground-truth flow is the
/// projected center displacement.
struct MoverSpec {
  enum class Kind { kBox, kSphere };
  Kind kind = Kind::kBox;
  Vec3 half = Vec3(0.4, 0.4, 0.05);  // box half extents; sphere radius = half.x
  TextureSpec tex;
  Vec3 p0 = Vec3::Zero();
  Vec3 vel = Vec3::Zero();
  Vec3 acc = Vec3::Zero();
  Vec3 sin_amp = Vec3::Zero();
  double sin_freq = 0.0;
  double sin_phase = 0.0;

  Vec3 center(double t) const;
};

/// Camera path over global time; inside an exposure the pose is interpolated
/// along the endpoint geodesic, matching the renderer's convention.
struct CameraPathSpec {
  Vec3 t0 = Vec3::Zero();
  Vec3 vel = Vec3::Zero();
  Vec3 rot_axis = Vec3::UnitY();
  double rot_rate = 0.0;  // radians across [0,1], centered at t = 0.5

  Pose pose(double t) const;
};

struct SceneScript {
  std::string name = "custom";
  int width = 96, height = 54;
  int frames = 12;
  int n = 7;        // model timestamps per exposure
  int substeps = 21;  // blur-averaging substeps, >= n
  double exposure_fraction = 0.5;  // of the inter-frame interval
  double fx = 92.0, fy = 92.0;
  double near_s = 2.0, far_s = 9.0;
  double bg_depth = 6.0;
  TextureSpec bg_tex;
  std::vector<MoverSpec> movers;
  CameraPathSpec campath;
  bool corrupt_priors = false;
  int corrupt_radius = 2;

  Camera camera() const;
  double frame_center(int i) const { return (double(i) - 0.5) / double(frames); }
  double exposure_half(int /*i*/) const { return 0.5 * exposure_fraction / double(frames); }
  /// Global time of timestamp l (1-based) in frame i; endpoint-inclusive.
  double timestamp_time(int i, int l) const;
  Pose pose_start(int i) const;
  Pose pose_end(int i) const;
  /// Pose at fraction alpha of frame i's exposure (endpoint geodesic).
  Pose pose_at(int i, double alpha) const;
};

SceneScript moving_square_script();
SceneScript two_movers_script();
SceneScript tiny_static_script();
SceneScript script_by_name(const std::string& name);

std::string script_to_json(const SceneScript& s);
SceneScript script_from_json(const std::string& json_text);

struct RasterResult {
  Image color;  // H x W x 3
  Image depth;  // H x W x 1, distance along the unit-direction ray
  Image mask;   // H x W x 1, 1 on mover pixels
};

/// Analytic nearest-hit rasterization at global time t.
RasterResult raster_sharp(const SceneScript& s, double t);

/// Mean of `substeps` sharp rasters spanning frame i's exposure.
Image make_blurry(const SceneScript& s, int i);

/// Exact pixel displacement of the surface point visible at (row, col) from
/// timestamp l of frame i to the matching timestamp of frame i+1.
Image gt_flow(const SceneScript& s, int i, int l);

struct FrameData {
  Image blurry, sharp;
  Image depth_prior;           // min over the n timestamps
  std::optional<Image> flow_prior;  // max-magnitude over timestamps; absent for the last frame
  Image mask;                  // union of mover coverage over the exposure
  Pose pose_start, pose_end;
  double t0 = 0, t1 = 0;
};

FrameData generate_frame(const SceneScript& s, int i);

/// Writes images plus a manifest.json into `out_dir`.
void generate_dataset(const SceneScript& s, const std::string& out_dir);

struct Dataset {
  SceneScript script;  // geometry/config part round-trips through the manifest
  Camera cam;
  int frames = 0;
  int n = 0;
  std::vector<FrameData> data;
};

Dataset load_dataset(const std::string& dir);

/// In-memory dataset construction (no disk round trip).
Dataset build_dataset(const SceneScript& script);

}  // namespace blurf
