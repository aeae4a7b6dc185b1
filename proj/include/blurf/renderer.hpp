// Copyright (c) 2026 The blurf Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <vector>

#include "blurf/fields.hpp"
#include "blurf/geometry.hpp"
#include "blurf/pose_graph.hpp"
#include "blurf/tensor.hpp"
#include "blurf/util.hpp"

namespace blurf {

/// Quadrature depths for a batch of rays, ascending within [near, far] per
/// ray. Deltas follow the usual convention: d_m = s_{m+1} - s_m with the last
/// one closing the interval to far.
struct SampleSet {
  int rays = 0;
  int m = 0;
  std::vector<double> depths;  // rays*m
  std::vector<double> deltas;  // rays*m
};

enum class JitterMode { kStratified, kMidpoint };

SampleSet make_samples(double near_s, double far_s, int rays, int m, JitterMode mode, Rng& rng);

struct RenderOutput {
  Tensor color;    // R x 3
  Tensor depth;    // R x 1, expected termination distance
  Tensor alpha;    // R x 1
  Tensor weights;  // R*M x 1
};

/// Volume-rendering quadrature over per-sample emissions.
RenderOutput render_ray(Tensor sigma, Tensor color, const SampleSet& samples);

/// Supplies the per-timestamp camera pose graph.
class PoseProvider {
 public:
  virtual ~PoseProvider() = default;
  virtual PoseNodes pose(Tape& tape, int frame, int l) = 0;
  virtual PoseNodes pose_alpha(Tape& tape, int frame, double alpha) = 0;
};

/// Twist-corrected endpoints interpolated along the start-anchored geodesic.
class ModelPoseProvider : public PoseProvider {
 public:
  explicit ModelPoseProvider(Model& model) : model_(model) {}
  PoseNodes pose(Tape& tape, int frame, int l) override;
  PoseNodes pose_alpha(Tape& tape, int frame, double alpha) override;

 private:
  PoseNodes endpoint(Tape& tape, int frame, bool end);
  Model& model_;
  std::uint64_t bound_epoch_ = 0;
  std::map<std::pair<int, int>, PoseNodes> cache_;      // (frame, l)
  std::map<std::pair<int, int>, PoseNodes> endpoints_;  // (frame, end?)
};

/// Fixed poses straight from a list (synthetic ground truth).
class FixedPoseProvider : public PoseProvider {
 public:
  FixedPoseProvider(std::vector<Pose> start, std::vector<Pose> end, int n)
      : start_(std::move(start)), end_(std::move(end)), n_(n) {}
  PoseNodes pose(Tape& tape, int frame, int l) override;
  PoseNodes pose_alpha(Tape& tape, int frame, double alpha) override;

 private:
  std::vector<Pose> start_, end_;
  int n_;
};

struct PixelBatch {
  int frame = 1;
  std::vector<int> row, col;
  int size() const { return int(row.size()); }
};

struct RenderSettings {
  int samples_m = 64;
  JitterMode jitter = JitterMode::kStratified;
  std::uint64_t seed = 0;
  std::int64_t step = 0;  // advances each pixel's jitter stream across steps
};

/// Per-tape rendering orchestration: field + poses + camera + sampling.
class RenderContext {
 public:
  RenderContext(Tape& tape, FieldProvider& field, PoseProvider& poses, const Camera& cam, int n,
                int frames, const RenderSettings& settings)
      : tape(tape), field(field), poses(poses), cam(cam), n(n), frames(frames), settings(settings) {}

  Tape& tape;
  FieldProvider& field;
  PoseProvider& poses;
  Camera cam;
  int n;
  int frames;
  RenderSettings settings;

  int t_flat(int frame, int l) const { return (frame - 1) * n + (l - 1); }
  double t_flat_mid(int frame) const { return (frame - 1) * n + (n - 1) / 2.0; }
  Tensor basis_rows();

 private:
  std::optional<Tensor> basis_;
};

/// One timestamp of an exposure: rays, samples, queries, and renders.
struct TimestampRender {
  PoseNodes pose;
  Tensor dirs;     // P x 3 unit directions
  Tensor dirs_pm;  // P*M x 3
  Tensor x;        // P*M x 3
  SampleSet samples;
  DynOut dyn;
  StatOut st;  // only if static requested
  bool has_static = false;
  RenderOutput dynamic_render;
  RenderOutput static_render;
  RenderOutput combined_render;
};

struct ExposureBundle {
  int frame = 1;
  PixelBatch pixels;
  std::vector<TimestampRender> ts;
  Tensor b_dy, b_st, b_cb;  // P x 3 exposure averages
  bool has_static = false;
};

/// Renders all n timestamps of a frame's exposure for a pixel batch, sharing
/// field queries across the dynamic/static/combined outputs.
ExposureBundle render_exposure_bundle(RenderContext& ctx, const PixelBatch& pixels,
                                      bool want_static);

enum class RenderMode { kDynamic, kStatic, kCombined };

struct ExposureRender {
  std::vector<RenderOutput> per_timestamp;
  Tensor blurry;  // uniform 1/n average
};

ExposureRender render_exposure(RenderContext& ctx, const PixelBatch& pixels, RenderMode mode);

/// Cross-time rendering of frame i's rays through frame j's field, with the
/// per-timestamp disocclusion weight maps.
struct CrossTimeRender {
  int target_frame = 1;
  Tensor blurry;         // P x 3, averaged warped colors
  Tensor disocclusion;   // P x 1, averaged weight maps
  std::vector<RenderOutput> per_timestamp;
  std::vector<Tensor> w_per_timestamp;  // P x 1 each
  std::vector<DynOut> warped_dyn;       // queried at (warped x, t_l^j)
  std::vector<Tensor> warped_x;
};

CrossTimeRender render_cross_time(RenderContext& ctx, const ExposureBundle& src, int target_frame);

/// Per-exposure depth/flow maps with extreme-value compositing. Flow maps are
/// (dcol, drow) displacements toward the matching timestamp of the next
/// exposure; the last frame has no forward flow.
struct PriorsRender {
  Tensor depth_evc;  // P x 1, min over timestamps
  Tensor depth_avg;  // P x 1, plain average (ablation path)
  bool has_flow = false;
  Tensor flow_evc;  // P x 2, max-magnitude selection
  Tensor flow_avg;  // P x 2
  std::vector<Tensor> depth_per_timestamp;
  std::vector<Tensor> flow_per_timestamp;
};

PriorsRender render_priors(RenderContext& ctx, const ExposureBundle& src);

/// Elementwise EVC compositing helpers (exposed for the worked-example check).
Tensor evc_depth(const std::vector<Tensor>& depths);
Tensor evc_flow(const std::vector<Tensor>& flows);

/// Single-pose render at an explicit pose and (possibly fractional) flattened
/// time; used for mid-exposure sharp views and oracle comparisons.
RenderOutput render_at(RenderContext& ctx, const PixelBatch& px, const PoseNodes& pose,
                       double t_flat, RenderMode mode);

}  // namespace blurf
