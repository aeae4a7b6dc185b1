// Copyright (c) 2026 The blurf Authors.
// SPDX-License-Identifier: Apache-2.0
#include "blurf/checks.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "blurf/cli.hpp"
#include "blurf/metrics.hpp"

namespace blurf {

namespace fs = std::filesystem;

namespace {

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

std::string read_file_bytes(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot read " + path);
  return std::string((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
}

}  // namespace

// ---------------------------------------------------------------------------
// gradient fidelity

Dataset gradient_toy_dataset() {
  SceneScript s;
  s.name = "gradient-toy";
  s.width = 8;
  s.height = 6;
  s.frames = 2;
  s.n = 2;
  s.substeps = 3;
  s.exposure_fraction = 0.5;
  s.fx = s.fy = 8.0;
  s.near_s = 2.0;
  s.far_s = 8.0;
  s.bg_depth = 6.0;
  s.bg_tex.base = Vec3(0.5, 0.45, 0.55);
  s.bg_tex.amp = Vec3(0.25, 0.2, 0.2);
  s.bg_tex.fu = 0.5;
  s.bg_tex.fv = 0.35;
  MoverSpec m;
  m.half = Vec3(0.6, 0.6, 0.1);
  m.p0 = Vec3(-0.5, 0.0, 4.0);
  m.vel = Vec3(1.2, 0.2, 0.0);
  m.tex.base = Vec3(0.7, 0.4, 0.3);
  m.tex.amp = Vec3(0.2, 0.25, 0.2);
  m.tex.fu = 0.8;
  m.tex.fv = 0.6;
  s.movers.push_back(m);
  s.campath.t0 = Vec3(-0.05, 0.0, 0.0);
  s.campath.vel = Vec3(0.1, 0.0, 0.0);
  s.campath.rot_axis = Vec3::UnitY();
  s.campath.rot_rate = 0.02;
  return build_dataset(s);
}

TrainConfig gradient_toy_config() {
  TrainConfig c;
  c.total_steps = 8;
  c.rays_per_batch = 4;
  c.seed = 12;
  c.model.dynamic_mlp = MlpConfig{8, 2, -1};
  c.model.static_mlp = MlpConfig{8, 2, -1};
  c.model.color_head_width = 8;
  c.model.l_pos = 2;
  c.model.l_dir = 1;
  c.model.l_time = 1;
  c.model.n = 2;
  c.model.frames = 2;
  c.model.K = 2;
  c.model.learnable_basis = true;
  c.model.use_static = true;
  c.model.samples_per_ray = 8;
  c.model.near_s = 2.0;
  c.model.far_s = 8.0;
  c.weights.data_decay_interval = 1000;
  return c;
}

CheckResult check_gradient_fidelity() {
  Timer timer;
  CheckResult res;
  res.name = "criterion 1: gradient fidelity vs central differences";

  Dataset ds = gradient_toy_dataset();
  TrainConfig cfg = gradient_toy_config();
  std::vector<Pose> starts, ends;
  for (const auto& fd : ds.data) {
    starts.push_back(fd.pose_start);
    ends.push_back(fd.pose_end);
  }
  Model model(cfg.model, starts, ends, cfg.seed);
  Trainer trainer(model, ds, cfg);

  // pick a step whose batch lands on frame 1 so forward flow terms are live
  std::int64_t step = 0;
  for (std::int64_t s = 0; s < 16; ++s) {
    Rng rng = keyed_rng(cfg.seed, 0x42415443ull, std::uint64_t(s));
    if (rng.uniform_int(1, ds.frames) == 1) {
      step = s;
      break;
    }
  }

  std::vector<std::vector<double>> detach_log;
  double analytic_total = 0.0;
  {
    Tape tape;
    tape.set_detach_mode(Tape::DetachMode::kRecord, &detach_log);
    LossTerms terms = trainer.forward(tape, step);
    analytic_total = terms.total.val()[0];
    model.store().zero_grad();
    tape.backward(terms.total);
  }
  std::vector<std::vector<double>> grads;
  for (const auto& p : model.store().all()) grads.push_back(p.grad);

  auto eval_total = [&]() {
    Tape tape;
    tape.set_detach_mode(Tape::DetachMode::kReplay, &detach_log);
    return trainer.forward(tape, step).total.val()[0];
  };

  // h small enough that no rectifier pre-activation flips inside the stencil
  const double h = 1e-6;
  double max_rel = 0.0;
  std::string worst;
  auto& params = model.store().all();
  for (std::size_t k = 0; k < params.size(); ++k) {
    for (std::size_t i = 0; i < params[k].value.size(); ++i) {
      const double saved = params[k].value[i];
      params[k].value[i] = saved + h;
      const double fp = eval_total();
      params[k].value[i] = saved - h;
      const double fm = eval_total();
      params[k].value[i] = saved;
      const double fd = (fp - fm) / (2.0 * h);
      const double an = grads[k][i];
      const double rel = std::fabs(fd - an) / std::max({std::fabs(fd), std::fabs(an), 1e-6});
      if (rel > max_rel) {
        max_rel = rel;
        worst = params[k].name + "[" + std::to_string(i) + "]";
      }
    }
  }
  res.seconds = timer.seconds();
  res.pass = max_rel <= 1e-3 && res.seconds < 30.0;
  res.detail = "max rel err " + fmt(max_rel) + " at " + worst + ", total " + fmt(analytic_total);
  return res;
}

// ---------------------------------------------------------------------------
// volume rendering

CheckResult check_volume_oracle() {
  Timer timer;
  CheckResult res;
  res.name = "criterion 2: volume rendering quadrature";

  bool pass = true;
  std::string detail;
  {
    // two samples with sigma*delta = ln 2 each: color = 0.5 c1 + 0.25 c2
    Tape tape;
    SampleSet s;
    s.rays = 1;
    s.m = 2;
    s.depths = {1.0, 1.5};
    s.deltas = {0.5, 0.5};
    const double sig = std::log(2.0) / 0.5;
    Tensor sigma = tape.constant({2, 1}, {sig, sig});
    Tensor color = tape.constant({2, 3}, {0.2, 0.4, 0.8, 0.9, 0.1, 0.3});
    RenderOutput out = render_ray(sigma, color, s);
    double err = 0.0;
    const double expect[3] = {0.5 * 0.2 + 0.25 * 0.9, 0.5 * 0.4 + 0.25 * 0.1,
                              0.5 * 0.8 + 0.25 * 0.3};
    for (int c = 0; c < 3; ++c) err = std::max(err, std::fabs(out.color.val()[c] - expect[c]));
    pass = pass && err <= 1e-10;
    detail += "closed-form err " + fmt(err);
  }
  {
    // telescoping on 10k random rays
    Rng rng(123);
    const int m = 16;
    double max_err = 0.0;
    for (int chunk = 0; chunk < 20; ++chunk) {
      const int rays = 500;
      Tape tape;
      SampleSet s = make_samples(1.0, 7.0, rays, m, JitterMode::kStratified, rng);
      std::vector<double> sig(std::size_t(rays) * m);
      for (auto& v : sig) v = rng.uniform(0.0, 40.0);
      Tensor sigma = tape.constant({rays * m, 1}, sig);
      Tensor color = tape.constant({rays * m, 3}, std::vector<double>(std::size_t(rays) * m * 3, 0.5));
      RenderOutput out = render_ray(sigma, color, s);
      const auto& w = out.weights.val();
      for (int r = 0; r < rays; ++r) {
        double acc = 0.0, optical = 0.0;
        for (int k = 0; k < m; ++k) {
          acc += w[std::size_t(r) * m + k];
          optical += sig[std::size_t(r) * m + k] * s.deltas[std::size_t(r) * m + k];
        }
        max_err = std::max(max_err, std::fabs(acc + std::exp(-optical) - 1.0));
      }
    }
    pass = pass && max_err <= 1e-9;
    detail += ", telescoping err " + fmt(max_err);
  }
  res.seconds = timer.seconds();
  res.pass = pass;
  res.detail = detail;
  return res;
}

// ---------------------------------------------------------------------------
// SE(3)

namespace {

Pose random_pose(Rng& rng, double max_angle) {
  Vec3 axis(rng.normal(), rng.normal(), rng.normal());
  axis.normalize();
  const double angle = rng.uniform(0.0, max_angle);
  Twist t;
  t.omega = axis * angle;
  t.v = Vec3(rng.normal(), rng.normal(), rng.normal());
  return se3_exp(t);
}

double pose_diff(const Pose& a, const Pose& b) {
  double err = (a.rotation - b.rotation).cwiseAbs().maxCoeff();
  err = std::max(err, (a.translation - b.translation).cwiseAbs().maxCoeff());
  return err;
}

}  // namespace

CheckResult check_se3_suite() {
  Timer timer;
  CheckResult res;
  res.name = "criterion 3: SE(3) interpolation suite";
  Rng rng(777);
  double endpoint_err = 0.0, roundtrip_err = 0.0, geodesic_err = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const Pose a = random_pose(rng, 3.0);
    const Pose b = random_pose(rng, 3.0);
    endpoint_err = std::max(endpoint_err, pose_diff(interpolate_pose(a, b, 1, 7), a));
    endpoint_err = std::max(endpoint_err, pose_diff(interpolate_pose(a, b, 7, 7), b));

    const Pose p = random_pose(rng, 3.0);
    roundtrip_err = std::max(roundtrip_err, pose_diff(se3_exp(se3_log(p)), p));

    // two-stage interpolation along one geodesic equals the direct fraction
    if (pose_diff(a, b) > 0) {
      const double angle_rel = so3_log((a.inverse() * b).rotation).norm();
      if (angle_rel < 3.1) {
        const Pose mid = interpolate_pose(a, b, 3, 5);          // alpha = 0.5
        const Pose two_stage = interpolate_pose(mid, b, 2, 3);  // 0.5 + 0.5*0.5 = 0.75
        const Pose direct = interpolate_pose(a, b, 4, 5);       // alpha = 0.75
        geodesic_err = std::max(geodesic_err, pose_diff(two_stage, direct));
      }
    }
  }
  res.seconds = timer.seconds();
  res.pass = endpoint_err <= 1e-9 && roundtrip_err <= 1e-8 && geodesic_err <= 1e-8;
  res.detail = "endpoint " + fmt(endpoint_err) + ", roundtrip " + fmt(roundtrip_err) +
               ", geodesic " + fmt(geodesic_err);
  return res;
}

// ---------------------------------------------------------------------------
// DCT

CheckResult check_dct_suite() {
  Timer timer;
  CheckResult res;
  res.name = "criterion 4: DCT trajectory basis";
  const int n = 7, N = 12, K = 6;
  const DctBasis basis = make_dct_basis(n, N, K);
  Rng rng(99);
  double eval_err = 0.0, lin_err = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    DctCoefficients psi(K, 3), psi2(K, 3);
    for (int k = 0; k < K; ++k)
      for (int a = 0; a < 3; ++a) {
        psi(k, a) = rng.normal();
        psi2(k, a) = rng.normal();
      }
    const double ca = rng.uniform(-2.0, 2.0), cb = rng.uniform(-2.0, 2.0);
    for (int i = 1; i <= N; ++i)
      for (int l = 1; l <= n; ++l) {
        const TimeIndex t{i, l};
        // brute-force evaluation straight from the cosine definition
        Eigen::Vector3d brute = Eigen::Vector3d::Zero();
        const int flat = t.flat(n);
        for (int k = 1; k <= K; ++k)
          brute += psi.row(k - 1).transpose() *
                   std::cos(M_PI / (2.0 * n * N) * (2.0 * flat + 1.0) * k);
        brute *= std::sqrt(2.0 / double(n * N));
        eval_err = std::max(eval_err, (eval_trajectory(psi, basis, t) - brute).cwiseAbs().maxCoeff());

        const Eigen::Vector3d lhs = eval_trajectory(ca * psi + cb * psi2, basis, t);
        const Eigen::Vector3d rhs =
            ca * eval_trajectory(psi, basis, t) + cb * eval_trajectory(psi2, basis, t);
        lin_err = std::max(lin_err, (lhs - rhs).cwiseAbs().maxCoeff());
      }
  }
  res.seconds = timer.seconds();
  res.pass = eval_err <= 1e-12 && lin_err <= 1e-12;
  res.detail = "brute-force err " + fmt(eval_err) + ", linearity err " + fmt(lin_err);
  return res;
}

// ---------------------------------------------------------------------------
// EVC worked example

CheckResult check_evc_example() {
  Timer timer;
  CheckResult res;
  res.name = "criterion 5: extreme-value compositing example";
  Tape tape;
  std::vector<Tensor> depths = {tape.constant_scalar(10.0), tape.constant_scalar(100.0),
                                tape.constant_scalar(100.0)};
  const double evc = evc_depth(depths).val()[0];
  Tensor avg = mul_c(add(add(depths[0], depths[1]), depths[2]), 1.0 / 3.0);
  const double mean = avg.val()[0];
  res.seconds = timer.seconds();
  res.pass = evc == 10.0 && mean == 70.0;
  res.detail = "evc " + fmt(evc) + ", average " + fmt(mean);
  return res;
}

// ---------------------------------------------------------------------------
// scripted field for the degeneracy and blur oracles

namespace {

/// Time-constant opaque analytic field with zero trajectory coefficients.
class ScriptedField : public FieldProvider {
 public:
  ScriptedField(int n, int N, int K) : meta_(make_dct_basis(n, N, K)) {}

  DynOut dynamic(Tape& tape, Tensor x, Tensor d, double) override {
    (void)d;
    const int rows = x.shape().rows;
    DynOut out;
    out.sigma = tape.constant({rows, 1}, std::vector<double>(std::size_t(rows), 1000.0));
    // smooth position-dependent color
    const std::vector<double> mix = {0.7, 0.1, -0.2, -0.3, 0.8, 0.25, 0.15, -0.4, 0.6};
    Tensor proj = matmul(x, tape.constant({3, 3}, mix));
    out.color = add_c(mul_c(sin_t(proj), 0.35), 0.5);
    out.psi = tape.zeros({rows, 3 * meta_.K});
    out.w_fw = tape.zeros({rows, 1});
    out.w_bw = tape.zeros({rows, 1});
    return out;
  }

  StatOut static_field(Tape&, Tensor, Tensor) override {
    throw std::logic_error("scripted field has no static branch");
  }
  bool has_static() const override { return false; }
  Tensor basis_rows(Tape& tape) override {
    return tape.constant({meta_.total_timestamps(), meta_.K}, meta_.table);
  }
  const DctBasis& basis_meta() const override { return meta_; }

 private:
  DctBasis meta_;
};

PixelBatch grid_batch(int frame, int width, int height, int stride) {
  PixelBatch px;
  px.frame = frame;
  for (int r = 0; r < height; r += stride)
    for (int c = 0; c < width; c += stride) {
      px.row.push_back(r);
      px.col.push_back(c);
    }
  return px;
}

}  // namespace

CheckResult check_cross_degeneracy() {
  Timer timer;
  CheckResult res;
  res.name = "criterion 6: cross-time degeneracy";

  const int n = 3, N = 2, K = 2;
  ScriptedField field(n, N, K);
  Camera cam;
  cam.fx = cam.fy = 20.0;
  cam.cx = 7.5;
  cam.cy = 5.5;
  cam.width = 16;
  cam.height = 12;
  cam.near_s = 2.0;
  cam.far_s = 8.0;
  std::vector<Pose> starts(2), ends(2);
  starts[0].translation = Vec3(0.0, 0.0, 0.0);
  ends[0].translation = Vec3(0.05, 0.0, 0.0);
  starts[1].translation = Vec3(0.10, 0.0, 0.0);
  ends[1].translation = Vec3(0.15, 0.0, 0.0);
  FixedPoseProvider poses(starts, ends, n);

  Tape tape;
  RenderSettings rs;
  rs.samples_m = 16;
  rs.jitter = JitterMode::kMidpoint;
  RenderContext ctx(tape, field, poses, cam, n, N, rs);
  PixelBatch px = grid_batch(1, cam.width, cam.height, 3);

  ExposureBundle bundle = render_exposure_bundle(ctx, px, false);
  CrossTimeRender cross = render_cross_time(ctx, bundle, 2);

  double warp_err = 0.0;
  for (int l = 1; l <= n; ++l) {
    // zero flow + time-constant field: the warped render must equal the
    // direct render of the same rays
    const auto& a = cross.per_timestamp[std::size_t(l - 1)].color.val();
    const auto& b = bundle.ts[std::size_t(l - 1)].dynamic_render.color.val();
    for (std::size_t k = 0; k < a.size(); ++k) warp_err = std::max(warp_err, std::fabs(a[k] - b[k]));
  }

  std::vector<double> gt_vals(std::size_t(px.size()) * 3, 0.3);
  Tensor gt = tape.constant({px.size(), 3}, gt_vals);
  const double lc = loss_cross({cross}, gt).val()[0];
  const double plain = loss_rgb(bundle.b_dy, gt).val()[0];
  const double loss_err = std::fabs(lc - plain) / std::max(1.0, std::fabs(plain));

  res.seconds = timer.seconds();
  res.pass = warp_err <= 1e-10 && loss_err <= 1e-10;
  res.detail = "warp err " + fmt(warp_err) + ", loss err " + fmt(loss_err);
  return res;
}

CheckResult check_blur_oracle() {
  Timer timer;
  CheckResult res;
  res.name = "criterion 7: blur formation oracle";

  // (a) exposure render vs independent per-timestamp render-then-average
  double avg_err = 0.0;
  {
    const int n = 5, N = 2, K = 2;
    ScriptedField field(n, N, K);
    Camera cam;
    cam.fx = cam.fy = 20.0;
    cam.cx = 7.5;
    cam.cy = 5.5;
    cam.width = 16;
    cam.height = 12;
    cam.near_s = 2.0;
    cam.far_s = 8.0;
    std::vector<Pose> starts(2), ends(2);
    ends[0].translation = Vec3(0.2, 0.05, 0.0);
    starts[1].translation = Vec3(0.25, 0.05, 0.0);
    ends[1].translation = Vec3(0.4, 0.1, 0.0);
    FixedPoseProvider poses(starts, ends, n);
    PixelBatch px = grid_batch(1, cam.width, cam.height, 2);

    Tape tape;
    RenderSettings rs;
    rs.samples_m = 12;
    rs.jitter = JitterMode::kMidpoint;
    RenderContext ctx(tape, field, poses, cam, n, N, rs);
    ExposureRender er = render_exposure(ctx, px, RenderMode::kDynamic);

    std::vector<double> acc(std::size_t(px.size()) * 3, 0.0);
    for (int l = 1; l <= n; ++l) {
      Tape tl;
      RenderContext cl(tl, field, poses, cam, n, N, rs);
      PoseNodes pose = poses.pose(tl, 1, l);
      RenderOutput ro = render_at(cl, px, pose, cl.t_flat(1, l), RenderMode::kDynamic);
      const auto& v = ro.color.val();
      for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += v[k];
    }
    for (auto& v : acc) v *= 1.0 / double(n);
    const auto& b = er.blurry.val();
    for (std::size_t k = 0; k < acc.size(); ++k) avg_err = std::max(avg_err, std::fabs(acc[k] - b[k]));
  }

  // (b) moving-square blur vs line-kernel convolution of the sharp frame
  double conv_err = 0.0;
  {
    SceneScript sc;
    sc.name = "conv-oracle";
    sc.width = 64;
    sc.height = 32;
    sc.frames = 3;
    sc.n = 3;
    sc.substeps = 7;
    sc.exposure_fraction = 0.5;
    sc.fx = sc.fy = 60.0;
    sc.near_s = 2.0;
    sc.far_s = 9.0;
    sc.bg_depth = 6.0;
    sc.bg_tex.base = Vec3(0.4, 0.5, 0.6);
    sc.bg_tex.amp = Vec3::Zero();  // uniform background: shifts are invisible
    MoverSpec mv;
    mv.kind = MoverSpec::Kind::kBox;
    mv.half = Vec3(0.5, 0.4, 1e-5);
    mv.tex.base = Vec3(0.6, 0.45, 0.35);
    mv.tex.amp = Vec3(0.3, 0.3, 0.25);
    mv.tex.fu = 1.3;
    mv.tex.fv = 0.9;
    const double z_front = 4.0 - mv.half.z();
    const int S = sc.substeps;
    const double half_exp = 0.5 * sc.exposure_fraction / sc.frames;
    const double dt_sub = 2.0 * half_exp / double(S - 1);
    const double vx = z_front / (sc.fx * dt_sub);  // exactly 1 px per substep
    mv.vel = Vec3(vx, 0.0, 0.0);
    mv.p0 = Vec3(-vx * 0.5, 0.0, 4.0);  // centered at mid-video
    sc.movers.push_back(mv);

    const Image blurry = make_blurry(sc, 2);
    const RasterResult mid = raster_sharp(sc, sc.frame_center(2));
    const int reach = (S - 1) / 2;
    for (int r = 0; r < sc.height; ++r)
      for (int c = reach; c < sc.width - reach; ++c)
        for (int ch = 0; ch < 3; ++ch) {
          double acc = 0.0;
          for (int k = -reach; k <= reach; ++k) acc += mid.color.at(r, c - k, ch);
          acc /= double(S);
          conv_err = std::max(conv_err, std::fabs(acc - blurry.at(r, c, ch)));
        }
  }

  res.seconds = timer.seconds();
  res.pass = avg_err <= 1e-12 && conv_err <= 1e-6;
  res.detail = "average err " + fmt(avg_err) + ", convolution err " + fmt(conv_err);
  return res;
}

std::vector<CheckResult> run_fast_checks() {
  return {check_gradient_fidelity(), check_volume_oracle(), check_se3_suite(), check_dct_suite(),
          check_evc_example(),       check_cross_degeneracy(), check_blur_oracle()};
}

// ---------------------------------------------------------------------------
// training-scale checks

TrainConfig acceptance_train_config(int frames) {
  TrainConfig c;
  c.total_steps = 20000;
  c.rays_per_batch = 28;
  c.seed = 7;
  c.checkpoint_interval = 20000;
  c.model.dynamic_mlp = MlpConfig{64, 4, 2};
  c.model.static_mlp = MlpConfig{64, 4, 2};
  c.model.color_head_width = 32;
  c.model.l_pos = 6;
  c.model.l_dir = 2;
  c.model.l_time = 4;
  c.model.n = 7;
  c.model.frames = frames;
  c.model.K = 6;
  c.model.learnable_basis = true;
  c.model.use_static = true;
  c.model.samples_per_ray = 24;
  c.model.near_s = 2.0;
  c.model.far_s = 9.0;
  c.weights.data_decay_interval = 3333;
  return c;
}

namespace {

void ensure_dataset(const SceneScript& script, const std::string& dir) {
  if (!fs::exists(dir + "/manifest.json")) generate_dataset(script, dir);
}

EvalReport train_and_eval(const Dataset& ds, TrainConfig cfg, const std::string& out_dir) {
  std::vector<Pose> starts, ends;
  for (const auto& fd : ds.data) {
    starts.push_back(fd.pose_start);
    ends.push_back(fd.pose_end);
  }
  Model model(cfg.model, starts, ends, cfg.seed);
  Trainer trainer(model, ds, cfg);
  trainer.run(out_dir);
  EvalReport ev = evaluate_model(model, ds, cfg.model.samples_per_ray);
  if (!out_dir.empty()) {
    std::ofstream os(out_dir + "/eval.json");
    os << ev.to_json() << "\n";
  }
  return ev;
}

}  // namespace

CheckResult check_end_to_end(const std::string& work_dir) {
  Timer timer;
  CheckResult res;
  res.name = "criterion 8: end-to-end deblurring gain";

  const std::string data_dir = work_dir + "/dataset_moving_square";
  ensure_dataset(moving_square_script(), data_dir);
  Dataset ds = load_dataset(data_dir);

  const EvalReport baseline = evaluate_baseline(ds);
  {
    std::ofstream os(work_dir + "/baseline_eval.json");
    os << baseline.to_json() << "\n";
  }
  TrainConfig cfg = acceptance_train_config(ds.frames);
  const EvalReport ev = train_and_eval(ds, cfg, work_dir + "/run1");

  res.seconds = timer.seconds();
  const double gain = ev.mean_psnr - baseline.mean_psnr;
  res.pass = gain >= 3.0 && res.seconds <= 7200.0;
  res.detail = "baseline " + fmt(baseline.mean_psnr) + " dB, trained " + fmt(ev.mean_psnr) +
               " dB, gain " + fmt(gain) + " dB, " + fmt(res.seconds) + " s";
  return res;
}

CheckResult check_determinism(const std::string& work_dir) {
  Timer timer;
  CheckResult res;
  res.name = "criterion 10: seeded run determinism";

  const std::string data_dir = work_dir + "/dataset_moving_square";
  ensure_dataset(moving_square_script(), data_dir);
  Dataset ds = load_dataset(data_dir);
  TrainConfig cfg = acceptance_train_config(ds.frames);

  if (!fs::exists(work_dir + "/run1/eval.json")) train_and_eval(ds, cfg, work_dir + "/run1");
  train_and_eval(ds, cfg, work_dir + "/run2");

  const std::string ckpt = "/ckpt_" + std::to_string(cfg.total_steps);
  const bool ckpt_same =
      read_file_bytes(work_dir + "/run1" + ckpt) == read_file_bytes(work_dir + "/run2" + ckpt);
  const bool eval_same =
      read_file_bytes(work_dir + "/run1/eval.json") == read_file_bytes(work_dir + "/run2/eval.json");
  res.seconds = timer.seconds();
  res.pass = ckpt_same && eval_same;
  res.detail = std::string("checkpoints ") + (ckpt_same ? "identical" : "differ") + ", reports " +
               (eval_same ? "identical" : "differ");
  return res;
}

CheckResult check_ablation_directions(const std::string& work_dir) {
  Timer timer;
  CheckResult res;
  res.name = "criterion 9: ablation directions";

  SceneScript script = two_movers_script();
  script.corrupt_priors = true;  // EVC is compared on degraded priors
  const std::string data_dir = work_dir + "/dataset_two_movers";
  ensure_dataset(script, data_dir);
  Dataset ds = load_dataset(data_dir);

  const std::int64_t abl_steps = 1500;
  std::ostringstream detail;
  bool pass = true;
  for (std::uint64_t seed : {21ull, 22ull, 23ull}) {
    TrainConfig base = acceptance_train_config(ds.frames);
    base.total_steps = abl_steps;
    base.checkpoint_interval = abl_steps;
    base.weights.data_decay_interval = abl_steps / 6;
    base.seed = seed;

    TrainConfig no_cross = base;
    no_cross.use_cross = false;
    TrainConfig no_evc = base;
    no_evc.use_evc = false;
    TrainConfig no_static = base;
    no_static.model.use_static = false;

    const std::string sd = work_dir + "/abl_seed" + std::to_string(seed);
    const double full = train_and_eval(ds, base, sd + "/full").mean_psnr;
    const double nc = train_and_eval(ds, no_cross, sd + "/no_cross").mean_psnr;
    const double ne = train_and_eval(ds, no_evc, sd + "/no_evc").mean_psnr;
    const double ns = train_and_eval(ds, no_static, sd + "/no_static").mean_psnr;
    const bool ok = full > nc && full > ne && full > ns;
    pass = pass && ok;
    detail << "seed " << seed << ": full " << fmt(full) << " vs no-cross " << fmt(nc)
           << ", no-evc " << fmt(ne) << ", no-static " << fmt(ns) << (ok ? " ok; " : " FAIL; ");
  }
  res.seconds = timer.seconds();
  res.pass = pass;
  res.detail = detail.str();
  return res;
}

}  // namespace blurf
