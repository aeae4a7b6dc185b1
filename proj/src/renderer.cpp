// Copyright (c) 2026 The blurf Authors.
// SPDX-License-Identifier: Apache-2.0
#include "blurf/renderer.hpp"

#include <cmath>

namespace blurf {

SampleSet make_samples(double near_s, double far_s, int rays, int m, JitterMode mode, Rng& rng) {
  if (!(near_s > 0.0) || !(far_s > near_s)) throw std::invalid_argument("samples: need 0 < near < far");
  SampleSet s;
  s.rays = rays;
  s.m = m;
  s.depths.resize(std::size_t(rays) * m);
  s.deltas.resize(std::size_t(rays) * m);
  const double span = far_s - near_s;
  for (int r = 0; r < rays; ++r) {
    double* d = &s.depths[std::size_t(r) * m];
    for (int k = 0; k < m; ++k) {
      const double u = mode == JitterMode::kStratified ? rng.uniform() : 0.5;
      d[k] = near_s + span * (double(k) + u) / double(m);
    }
    double* dl = &s.deltas[std::size_t(r) * m];
    for (int k = 0; k < m - 1; ++k) dl[k] = d[k + 1] - d[k];
    dl[m - 1] = far_s - d[m - 1];
  }
  return s;
}

RenderOutput render_ray(Tensor sigma, Tensor color, const SampleSet& samples) {
  Tape& tape = *sigma.tape;
  const int m = samples.m;
  const int total = samples.rays * m;
  if (sigma.shape().rows != total || sigma.shape().cols != 1)
    throw std::invalid_argument("render_ray: sigma must be (rays*m) x 1");
  for (double v : sigma.val())
    if (!std::isfinite(v)) throw std::domain_error("render_ray: non-finite density");

  Tensor w = volume_weights(sigma, samples.deltas, m);

  RenderOutput out;
  out.weights = w;
  out.color = block_sum(mul_colvec(color, w), m);
  out.depth = block_sum(mul(w, tape.constant({total, 1}, samples.depths)), m);
  out.alpha = block_sum(w, m);
  return out;
}

// ---------------------------------------------------------------------------

PoseNodes ModelPoseProvider::endpoint(Tape& tape, int frame, bool end) {
  if (bound_epoch_ != tape.epoch()) {
    bound_epoch_ = tape.epoch();
    cache_.clear();
    endpoints_.clear();
  }
  const auto key = std::make_pair(frame, int(end));
  auto it = endpoints_.find(key);
  if (it != endpoints_.end()) return it->second;
  const Pose& init = end ? model_.init_end(frame) : model_.init_start(frame);
  Tensor twist = model_.store().use(tape, Model::twist_name(frame, end));
  PoseNodes p = pose_compose(pose_constant(tape, init), pose_exp_graph(twist));
  endpoints_.emplace(key, p);
  return p;
}

PoseNodes ModelPoseProvider::pose(Tape& tape, int frame, int l) {
  const int n = model_.config().n;
  if (l < 1 || l > n) throw std::out_of_range("pose: timestamp index out of range");
  if (bound_epoch_ == tape.epoch()) {
    auto it = cache_.find({frame, l});
    if (it != cache_.end()) return it->second;
  }
  PoseNodes out;
  if (n == 1 || l == 1) {
    out = endpoint(tape, frame, false);
  } else {
    PoseNodes a = endpoint(tape, frame, false);
    PoseNodes b = endpoint(tape, frame, true);
    out = pose_interpolate_graph(a, b, double(l - 1) / double(n - 1));
  }
  cache_.emplace(std::make_pair(frame, l), out);
  return out;
}

PoseNodes ModelPoseProvider::pose_alpha(Tape& tape, int frame, double alpha) {
  PoseNodes a = endpoint(tape, frame, false);
  PoseNodes b = endpoint(tape, frame, true);
  return pose_interpolate_graph(a, b, alpha);
}

PoseNodes FixedPoseProvider::pose(Tape& tape, int frame, int l) {
  if (n_ == 1 || l == 1) return pose_constant(tape, start_[frame - 1]);
  return pose_constant(tape,
                       interpolate_pose(start_[frame - 1], end_[frame - 1], l, n_));
}

PoseNodes FixedPoseProvider::pose_alpha(Tape& tape, int frame, double alpha) {
  return pose_constant(tape, interpolate_pose_alpha(start_[frame - 1], end_[frame - 1], alpha));
}

Tensor RenderContext::basis_rows() {
  if (!basis_ || basis_->tape->epoch() != tape.epoch()) basis_ = field.basis_rows(tape);
  return *basis_;
}

// ---------------------------------------------------------------------------

namespace {

Tensor camera_dirs_const(Tape& tape, const Camera& cam, const PixelBatch& px) {
  std::vector<double> d(std::size_t(px.size()) * 3);
  for (int i = 0; i < px.size(); ++i) {
    d[std::size_t(i) * 3 + 0] = (double(px.col[i]) - cam.cx) / cam.fx;
    d[std::size_t(i) * 3 + 1] = (double(px.row[i]) - cam.cy) / cam.fy;
    d[std::size_t(i) * 3 + 2] = 1.0;
  }
  return tape.constant({px.size(), 3}, d);
}

TimestampRender render_timestamp(RenderContext& ctx, const PixelBatch& px, int frame, int l,
                                 bool want_static) {
  TimestampRender tr;
  tr.pose = ctx.poses.pose(ctx.tape, frame, l);
  Tensor d_cam = camera_dirs_const(ctx.tape, ctx.cam, px);
  tr.dirs = normalize_rows(pose_rotate(tr.pose, d_cam));

  const int m = ctx.settings.samples_m;
  // per-pixel jitter streams keyed by (frame, row, col, l); step advances them
  SampleSet s;
  s.rays = px.size();
  s.m = m;
  s.depths.resize(std::size_t(px.size()) * m);
  s.deltas.resize(std::size_t(px.size()) * m);
  const double span = ctx.cam.far_s - ctx.cam.near_s;
  for (int r = 0; r < px.size(); ++r) {
    Rng prng = keyed_rng(ctx.settings.seed, 0x4a495454ull, std::uint64_t(frame),
                         std::uint64_t(px.row[r]), std::uint64_t(px.col[r]), std::uint64_t(l),
                         std::uint64_t(ctx.settings.step));
    double* d = &s.depths[std::size_t(r) * m];
    for (int k = 0; k < m; ++k) {
      const double u = ctx.settings.jitter == JitterMode::kStratified ? prng.uniform() : 0.5;
      d[k] = ctx.cam.near_s + span * (double(k) + u) / double(m);
    }
    double* dl = &s.deltas[std::size_t(r) * m];
    for (int k = 0; k < m - 1; ++k) dl[k] = d[k + 1] - d[k];
    dl[m - 1] = ctx.cam.far_s - d[m - 1];
  }
  tr.samples = std::move(s);

  tr.dirs_pm = block_expand(tr.dirs, m);
  Tensor depth_c = ctx.tape.constant({px.size() * m, 1}, tr.samples.depths);
  tr.x = add_rowvec(mul_colvec(tr.dirs_pm, depth_c), tr.pose.translation);

  tr.dyn = ctx.field.dynamic(ctx.tape, tr.x, tr.dirs_pm, ctx.t_flat(frame, l));
  tr.dynamic_render = render_ray(tr.dyn.sigma, tr.dyn.color, tr.samples);
  if (want_static && ctx.field.has_static()) {
    tr.has_static = true;
    tr.st = ctx.field.static_field(ctx.tape, tr.x, tr.dirs_pm);
    tr.static_render = render_ray(tr.st.sigma, tr.st.color, tr.samples);
    Tensor c_cb, s_cb;
    blend(tr.dyn, tr.st, &c_cb, &s_cb);
    tr.combined_render = render_ray(s_cb, c_cb, tr.samples);
  } else {
    tr.combined_render = tr.dynamic_render;
  }
  return tr;
}

Tensor average(const std::vector<Tensor>& ts) {
  Tensor acc = ts[0];
  for (std::size_t i = 1; i < ts.size(); ++i) acc = add(acc, ts[i]);
  return mul_c(acc, 1.0 / double(ts.size()));
}

}  // namespace

ExposureBundle render_exposure_bundle(RenderContext& ctx, const PixelBatch& pixels,
                                      bool want_static) {
  ExposureBundle b;
  b.frame = pixels.frame;
  b.pixels = pixels;
  b.has_static = want_static && ctx.field.has_static();
  std::vector<Tensor> dy, st, cb;
  for (int l = 1; l <= ctx.n; ++l) {
    b.ts.push_back(render_timestamp(ctx, pixels, pixels.frame, l, want_static));
    dy.push_back(b.ts.back().dynamic_render.color);
    if (b.has_static) st.push_back(b.ts.back().static_render.color);
    cb.push_back(b.ts.back().combined_render.color);
  }
  b.b_dy = average(dy);
  if (b.has_static) b.b_st = average(st);
  b.b_cb = average(cb);
  return b;
}

ExposureRender render_exposure(RenderContext& ctx, const PixelBatch& pixels, RenderMode mode) {
  ExposureBundle b = render_exposure_bundle(ctx, pixels, mode != RenderMode::kDynamic);
  ExposureRender out;
  for (auto& tr : b.ts) {
    switch (mode) {
      case RenderMode::kDynamic: out.per_timestamp.push_back(tr.dynamic_render); break;
      case RenderMode::kStatic: out.per_timestamp.push_back(tr.static_render); break;
      case RenderMode::kCombined: out.per_timestamp.push_back(tr.combined_render); break;
    }
  }
  switch (mode) {
    case RenderMode::kDynamic: out.blurry = b.b_dy; break;
    case RenderMode::kStatic: out.blurry = b.b_st; break;
    case RenderMode::kCombined: out.blurry = b.b_cb; break;
  }
  return out;
}

CrossTimeRender render_cross_time(RenderContext& ctx, const ExposureBundle& src, int target_frame) {
  const int i = src.frame;
  const int j = target_frame;
  if (j < 1 || j > ctx.frames) throw std::out_of_range("cross-time: target frame out of range");
  CrossTimeRender out;
  out.target_frame = j;
  Tensor basis = ctx.basis_rows();
  const DctBasis& meta = ctx.field.basis_meta();
  std::vector<Tensor> colors, wmaps;
  for (int l = 1; l <= ctx.n; ++l) {
    const TimestampRender& tr = src.ts[std::size_t(l - 1)];
    Tensor flow = scene_flow_graph(tr.dyn.psi, basis, meta, ctx.t_flat(i, l), ctx.t_flat(j, l));
    Tensor xw = add(tr.x, flow);
    DynOut dynw = ctx.field.dynamic(ctx.tape, xw, tr.dirs_pm, ctx.t_flat(j, l));
    RenderOutput rw = render_ray(dynw.sigma, dynw.color, tr.samples);

    // W_l = sum_m T_m alpha_m (1 - w^{i->j}(x_m)); transmittance from the
    // warped field at t_l^j, w from the source query at (x, t_l^i)
    Tensor w_src = j > i ? tr.dyn.w_fw : tr.dyn.w_bw;
    Tensor wl = block_sum(mul(rw.weights, add_c(neg(w_src), 1.0)), ctx.settings.samples_m);

    out.per_timestamp.push_back(rw);
    out.w_per_timestamp.push_back(wl);
    out.warped_dyn.push_back(dynw);
    out.warped_x.push_back(xw);
    colors.push_back(rw.color);
    wmaps.push_back(wl);
  }
  out.blurry = average(colors);
  out.disocclusion = average(wmaps);
  return out;
}

Tensor evc_depth(const std::vector<Tensor>& depths) { return min_list(depths); }

Tensor evc_flow(const std::vector<Tensor>& flows) {
  const int rows = flows[0].shape().rows;
  std::vector<int> idx(std::size_t(rows), 0);
  std::vector<double> best(std::size_t(rows), -1.0);
  for (std::size_t k = 0; k < flows.size(); ++k) {
    const auto& v = flows[k].val();
    for (int r = 0; r < rows; ++r) {
      const double n2 = v[std::size_t(r) * 2] * v[std::size_t(r) * 2] +
                        v[std::size_t(r) * 2 + 1] * v[std::size_t(r) * 2 + 1];
      if (n2 > best[std::size_t(r)]) {
        best[std::size_t(r)] = n2;
        idx[std::size_t(r)] = int(k);
      }
    }
  }
  return select_rows(flows, idx);
}

RenderOutput render_at(RenderContext& ctx, const PixelBatch& px, const PoseNodes& pose,
                       double t_flat, RenderMode mode) {
  Tensor d_cam = camera_dirs_const(ctx.tape, ctx.cam, px);
  Tensor dirs = normalize_rows(pose_rotate(pose, d_cam));
  const int m = ctx.settings.samples_m;

  SampleSet s;
  s.rays = px.size();
  s.m = m;
  s.depths.resize(std::size_t(px.size()) * m);
  s.deltas.resize(std::size_t(px.size()) * m);
  const double span = ctx.cam.far_s - ctx.cam.near_s;
  for (int r = 0; r < px.size(); ++r) {
    Rng prng = keyed_rng(ctx.settings.seed, 0x4a495454ull, std::uint64_t(px.frame),
                         std::uint64_t(px.row[r]), std::uint64_t(px.col[r]), std::uint64_t(0),
                         std::uint64_t(ctx.settings.step));
    double* d = &s.depths[std::size_t(r) * m];
    for (int k = 0; k < m; ++k) {
      const double u = ctx.settings.jitter == JitterMode::kStratified ? prng.uniform() : 0.5;
      d[k] = ctx.cam.near_s + span * (double(k) + u) / double(m);
    }
    double* dl = &s.deltas[std::size_t(r) * m];
    for (int k = 0; k < m - 1; ++k) dl[k] = d[k + 1] - d[k];
    dl[m - 1] = ctx.cam.far_s - d[m - 1];
  }

  Tensor dirs_pm = block_expand(dirs, m);
  Tensor depth_c = ctx.tape.constant({px.size() * m, 1}, s.depths);
  Tensor x = add_rowvec(mul_colvec(dirs_pm, depth_c), pose.translation);

  if (mode == RenderMode::kStatic) {
    StatOut st = ctx.field.static_field(ctx.tape, x, dirs_pm);
    return render_ray(st.sigma, st.color, s);
  }
  DynOut dyn = ctx.field.dynamic(ctx.tape, x, dirs_pm, t_flat);
  if (mode == RenderMode::kDynamic || !ctx.field.has_static())
    return render_ray(dyn.sigma, dyn.color, s);
  StatOut st = ctx.field.static_field(ctx.tape, x, dirs_pm);
  Tensor c_cb, s_cb;
  blend(dyn, st, &c_cb, &s_cb);
  return render_ray(s_cb, c_cb, s);
}

PriorsRender render_priors(RenderContext& ctx, const ExposureBundle& src) {
  const int i = src.frame;
  PriorsRender out;
  out.has_flow = i < ctx.frames;
  Tensor basis = ctx.basis_rows();
  const DctBasis& meta = ctx.field.basis_meta();
  const int m = ctx.settings.samples_m;

  std::vector<double> px_const(std::size_t(src.pixels.size()) * 2);
  for (int r = 0; r < src.pixels.size(); ++r) {
    px_const[std::size_t(r) * 2] = double(src.pixels.col[r]);
    px_const[std::size_t(r) * 2 + 1] = double(src.pixels.row[r]);
  }
  Tensor pixel_pos = ctx.tape.constant({src.pixels.size(), 2}, px_const);

  for (int l = 1; l <= ctx.n; ++l) {
    const TimestampRender& tr = src.ts[std::size_t(l - 1)];
    const RenderOutput& rr = tr.combined_render;
    out.depth_per_timestamp.push_back(rr.depth);
    if (!out.has_flow) continue;

    Tensor flow3 = scene_flow_graph(tr.dyn.psi, basis, meta, ctx.t_flat(i, l), ctx.t_flat(i + 1, l));
    Tensor flow_ray = block_sum(mul_colvec(flow3, rr.weights), m);  // P x 3 expected scene flow
    Tensor surf = add_rowvec(mul_colvec(tr.dirs, rr.depth), tr.pose.translation);
    Tensor warped = add(surf, flow_ray);

    PoseNodes next_pose = ctx.poses.pose(ctx.tape, i + 1, l);
    Tensor cam_pt = matmul(add_rowvec(warped, neg(next_pose.translation)), next_pose.rotation);
    Tensor xz = div(slice_cols(cam_pt, 0, 1), slice_cols(cam_pt, 2, 3));
    Tensor yz = div(slice_cols(cam_pt, 1, 2), slice_cols(cam_pt, 2, 3));
    Tensor u = add_c(mul_c(xz, ctx.cam.fx), ctx.cam.cx);
    Tensor v = add_c(mul_c(yz, ctx.cam.fy), ctx.cam.cy);
    out.flow_per_timestamp.push_back(sub(concat_cols({u, v}), pixel_pos));
  }

  out.depth_evc = evc_depth(out.depth_per_timestamp);
  out.depth_avg = average(out.depth_per_timestamp);
  if (out.has_flow) {
    out.flow_evc = evc_flow(out.flow_per_timestamp);
    out.flow_avg = average(out.flow_per_timestamp);
  }
  return out;
}

}  // namespace blurf
