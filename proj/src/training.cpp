// Copyright (c) 2026 The blurf Authors.
// SPDX-License-Identifier: Apache-2.0
#include "blurf/training.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include <json.hpp>

namespace blurf {

using nlohmann::json;

AdamOptimizer::AdamOptimizer(ParamStore& store, const AdamConfig& cfg) : store_(store), cfg_(cfg) {
  for (const auto& p : store.all()) {
    m_.emplace_back(p.value.size(), 0.0);
    v_.emplace_back(p.value.size(), 0.0);
  }
}

void AdamOptimizer::step() {
  ++t_;
  const double bc1 = 1.0 - std::pow(cfg_.beta1, double(t_));
  const double bc2 = 1.0 - std::pow(cfg_.beta2, double(t_));
  auto& params = store_.all();
  for (std::size_t k = 0; k < params.size(); ++k) {
    ParamTensor& p = params[k];
    if (!p.trainable) continue;
    bool finite = true;
    for (double g : p.grad)
      if (!std::isfinite(g)) {
        finite = false;
        break;
      }
    if (!finite) {
      ++skipped_;
      continue;
    }
    double lr = cfg_.lr_mlp;
    if (p.group == ParamGroup::kCamera) lr = cfg_.lr_camera;
    if (p.group == ParamGroup::kDctBasis) lr = cfg_.lr_basis;
    auto& m = m_[k];
    auto& v = v_[k];
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      const double g = p.grad[i];
      m[i] = cfg_.beta1 * m[i] + (1.0 - cfg_.beta1) * g;
      v[i] = cfg_.beta2 * v[i] + (1.0 - cfg_.beta2) * g * g;
      const double mhat = m[i] / bc1;
      const double vhat = v[i] / bc2;
      p.value[i] -= lr * mhat / (std::sqrt(vhat) + cfg_.eps);
    }
  }
}

AdamStateBlob AdamOptimizer::state() const {
  AdamStateBlob b;
  b.m = m_;
  b.v = v_;
  b.step = t_;
  return b;
}

void AdamOptimizer::set_state(const AdamStateBlob& blob) {
  if (blob.m.size() != m_.size()) throw std::invalid_argument("adam state size mismatch");
  m_ = blob.m;
  v_ = blob.v;
  t_ = blob.step;
}

// ---------------------------------------------------------------------------

namespace {

json mlp_to_json(const MlpConfig& m) {
  return json{{"width", m.width}, {"depth", m.depth}, {"skip", m.skip}};
}
MlpConfig mlp_from_json(const json& j) {
  MlpConfig m;
  m.width = j["width"];
  m.depth = j["depth"];
  m.skip = j["skip"];
  return m;
}

}  // namespace

std::string train_config_to_json(const TrainConfig& c) {
  json j;
  j["total_steps"] = c.total_steps;
  j["rays_per_batch"] = c.rays_per_batch;
  j["seed"] = c.seed;
  j["deterministic"] = c.deterministic;
  j["use_cross"] = c.use_cross;
  j["use_evc"] = c.use_evc;
  j["cross_rays"] = c.cross_rays;
  j["checkpoint_interval"] = c.checkpoint_interval;
  j["model"] = json{{"dynamic_mlp", mlp_to_json(c.model.dynamic_mlp)},
                    {"static_mlp", mlp_to_json(c.model.static_mlp)},
                    {"color_head_width", c.model.color_head_width},
                    {"l_pos", c.model.l_pos},
                    {"l_dir", c.model.l_dir},
                    {"l_time", c.model.l_time},
                    {"n", c.model.n},
                    {"frames", c.model.frames},
                    {"K", c.model.K},
                    {"learnable_basis", c.model.learnable_basis},
                    {"use_static", c.model.use_static},
                    {"samples_per_ray", c.model.samples_per_ray},
                    {"near", c.model.near_s},
                    {"far", c.model.far_s}};
  j["weights"] = json{{"lambda_data", c.weights.lambda_data},
                      {"lambda_sf", c.weights.lambda_sf},
                      {"lambda_st", c.weights.lambda_st},
                      {"lambda_cyc", c.weights.lambda_cyc},
                      {"lambda_w_reg", c.weights.lambda_w_reg},
                      {"data_decay_factor", c.weights.data_decay_factor},
                      {"data_decay_interval", c.weights.data_decay_interval}};
  j["adam"] = json{{"beta1", c.adam.beta1}, {"beta2", c.adam.beta2}, {"eps", c.adam.eps},
                   {"lr_mlp", c.adam.lr_mlp}, {"lr_camera", c.adam.lr_camera},
                   {"lr_basis", c.adam.lr_basis}};
  return j.dump(2);
}

TrainConfig train_config_from_json(const std::string& text) {
  const json j = json::parse(text);
  TrainConfig c;
  c.total_steps = j.value("total_steps", c.total_steps);
  c.rays_per_batch = j.value("rays_per_batch", c.rays_per_batch);
  c.seed = j.value("seed", c.seed);
  c.deterministic = j.value("deterministic", c.deterministic);
  c.use_cross = j.value("use_cross", c.use_cross);
  c.use_evc = j.value("use_evc", c.use_evc);
  c.cross_rays = j.value("cross_rays", c.cross_rays);
  c.checkpoint_interval = j.value("checkpoint_interval", c.checkpoint_interval);
  if (j.contains("model")) {
    const json& mj = j["model"];
    if (mj.contains("dynamic_mlp")) c.model.dynamic_mlp = mlp_from_json(mj["dynamic_mlp"]);
    if (mj.contains("static_mlp")) c.model.static_mlp = mlp_from_json(mj["static_mlp"]);
    c.model.color_head_width = mj.value("color_head_width", c.model.color_head_width);
    c.model.l_pos = mj.value("l_pos", c.model.l_pos);
    c.model.l_dir = mj.value("l_dir", c.model.l_dir);
    c.model.l_time = mj.value("l_time", c.model.l_time);
    c.model.n = mj.value("n", c.model.n);
    c.model.frames = mj.value("frames", c.model.frames);
    c.model.K = mj.value("K", c.model.K);
    c.model.learnable_basis = mj.value("learnable_basis", c.model.learnable_basis);
    c.model.use_static = mj.value("use_static", c.model.use_static);
    c.model.samples_per_ray = mj.value("samples_per_ray", c.model.samples_per_ray);
    c.model.near_s = mj.value("near", c.model.near_s);
    c.model.far_s = mj.value("far", c.model.far_s);
  }
  if (j.contains("weights")) {
    const json& wj = j["weights"];
    c.weights.lambda_data = wj.value("lambda_data", c.weights.lambda_data);
    c.weights.lambda_sf = wj.value("lambda_sf", c.weights.lambda_sf);
    c.weights.lambda_st = wj.value("lambda_st", c.weights.lambda_st);
    c.weights.lambda_cyc = wj.value("lambda_cyc", c.weights.lambda_cyc);
    c.weights.lambda_w_reg = wj.value("lambda_w_reg", c.weights.lambda_w_reg);
    c.weights.data_decay_factor = wj.value("data_decay_factor", c.weights.data_decay_factor);
    c.weights.data_decay_interval = wj.value("data_decay_interval", c.weights.data_decay_interval);
  }
  if (j.contains("adam")) {
    const json& aj = j["adam"];
    c.adam.beta1 = aj.value("beta1", c.adam.beta1);
    c.adam.beta2 = aj.value("beta2", c.adam.beta2);
    c.adam.eps = aj.value("eps", c.adam.eps);
    c.adam.lr_mlp = aj.value("lr_mlp", c.adam.lr_mlp);
    c.adam.lr_camera = aj.value("lr_camera", c.adam.lr_camera);
    c.adam.lr_basis = aj.value("lr_basis", c.adam.lr_basis);
  }
  return c;
}

int curriculum_radius(std::int64_t step, std::int64_t total_steps, int frames) {
  const double half = 0.5 * double(total_steps);
  const double frac = half > 0.0 ? std::min(1.0, double(step) / half) : 1.0;
  const int r = int(std::lround(2.0 + double(frames - 2) * frac));
  return std::max(2, r);
}

int curriculum_q(int i, std::int64_t step, std::int64_t total_steps, int frames, Rng& rng) {
  if (frames < 2) throw std::invalid_argument("curriculum_q: need at least two frames");
  const int r = curriculum_radius(step, total_steps, frames);
  const int lo = std::max(1, i - r);
  const int hi = std::min(frames, i + r);
  std::vector<int> cands;
  for (int f = lo; f <= hi; ++f)
    if (f != i) cands.push_back(f);
  return cands[std::size_t(rng.uniform_int(0, int(cands.size()) - 1))];
}

namespace {

// Front slice of an exposure bundle carrying only what the cross-time and
// scene-flow paths consume. Rays are batch-ordered, so the first `rays` form
// an unbiased sub-batch.
ExposureBundle slice_bundle(const ExposureBundle& src, int rays, int m) {
  ExposureBundle out;
  out.frame = src.frame;
  out.has_static = false;
  out.pixels.frame = src.pixels.frame;
  out.pixels.row.assign(src.pixels.row.begin(), src.pixels.row.begin() + rays);
  out.pixels.col.assign(src.pixels.col.begin(), src.pixels.col.begin() + rays);
  const int pm = rays * m;
  for (const auto& tr : src.ts) {
    TimestampRender t;
    t.pose = tr.pose;
    t.dirs = slice_rows(tr.dirs, 0, rays);
    t.dirs_pm = slice_rows(tr.dirs_pm, 0, pm);
    t.x = slice_rows(tr.x, 0, pm);
    t.samples.rays = rays;
    t.samples.m = m;
    t.samples.depths.assign(tr.samples.depths.begin(), tr.samples.depths.begin() + pm);
    t.samples.deltas.assign(tr.samples.deltas.begin(), tr.samples.deltas.begin() + pm);
    t.dyn.psi = slice_rows(tr.dyn.psi, 0, pm);
    t.dyn.w_fw = slice_rows(tr.dyn.w_fw, 0, pm);
    t.dyn.w_bw = slice_rows(tr.dyn.w_bw, 0, pm);
    out.ts.push_back(std::move(t));
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

Trainer::Trainer(Model& model, const Dataset& dataset, const TrainConfig& cfg)
    : model_(model), dataset_(dataset), cfg_(cfg), field_(model), poses_(model),
      adam_(model.store(), cfg.adam) {}

PixelBatch Trainer::sample_batch(std::int64_t step) const {
  Rng rng = keyed_rng(cfg_.seed, 0x42415443ull, std::uint64_t(step));
  PixelBatch b;
  b.frame = rng.uniform_int(1, dataset_.frames);
  b.row.resize(std::size_t(cfg_.rays_per_batch));
  b.col.resize(std::size_t(cfg_.rays_per_batch));
  for (int k = 0; k < cfg_.rays_per_batch; ++k) {
    b.row[std::size_t(k)] = rng.uniform_int(0, dataset_.cam.height - 1);
    b.col[std::size_t(k)] = rng.uniform_int(0, dataset_.cam.width - 1);
  }
  return b;
}

LossTerms Trainer::forward(Tape& tape, std::int64_t step) {
  const PixelBatch px = sample_batch(step);
  const int i = px.frame;
  const FrameData& fd = dataset_.data[std::size_t(i - 1)];
  const int P = px.size();

  RenderSettings rs;
  rs.samples_m = cfg_.model.samples_per_ray;
  rs.jitter = JitterMode::kStratified;
  rs.seed = cfg_.seed;
  rs.step = step;
  RenderContext ctx(tape, field_, poses_, dataset_.cam, cfg_.model.n, dataset_.frames, rs);

  // ground truth constants at the batch pixels
  std::vector<double> gt_rgb(std::size_t(P) * 3);
  std::vector<double> gt_depth(std::size_t(P), 0.0);
  std::vector<double> gt_flow(std::size_t(P) * 2, 0.0);
  std::vector<double> mask(std::size_t(P), 0.0);
  std::vector<double> flow_valid(std::size_t(P), 1.0);
  for (int k = 0; k < P; ++k) {
    for (int ch = 0; ch < 3; ++ch) gt_rgb[std::size_t(k) * 3 + ch] = fd.blurry.at(px.row[k], px.col[k], ch);
    gt_depth[std::size_t(k)] = fd.depth_prior.at(px.row[k], px.col[k]);
    mask[std::size_t(k)] = fd.mask.at(px.row[k], px.col[k]);
    if (fd.flow_prior) {
      gt_flow[std::size_t(k) * 2] = fd.flow_prior->at(px.row[k], px.col[k], 0);
      gt_flow[std::size_t(k) * 2 + 1] = fd.flow_prior->at(px.row[k], px.col[k], 1);
    }
  }
  Tensor gt = tape.constant({P, 3}, gt_rgb);
  Tensor gtd = tape.constant({P, 1}, gt_depth);
  Tensor gtf = fd.flow_prior ? tape.constant({P, 2}, gt_flow) : Tensor{};

  const bool with_static = cfg_.model.use_static;
  ExposureBundle bundle = render_exposure_bundle(ctx, px, with_static);

  LossTerms t;
  t.rgb_dy = loss_rgb(bundle.b_dy, gt);
  if (with_static) {
    t.rgb_st = loss_rgb_static(bundle.b_st, gt, mask);
    t.rgb_cb = loss_rgb(bundle.b_cb, gt);
  } else {
    t.rgb_st = tape.constant_scalar(0.0);
    t.rgb_cb = tape.constant_scalar(0.0);
  }

  // cross-time targets: both neighbors always drive the scene-flow terms;
  // the curriculum frame joins only when cross supervision is on
  std::vector<int> targets;
  if (i > 1) targets.push_back(i - 1);
  if (i < dataset_.frames) targets.push_back(i + 1);
  std::vector<CrossTimeRender> crosses;
  const CrossTimeRender* prev = nullptr;
  const CrossTimeRender* next = nullptr;
  if (cfg_.use_cross && dataset_.frames >= 2) {
    Rng qrng = keyed_rng(cfg_.seed, 0x51524e47ull, std::uint64_t(step));
    const int q = curriculum_q(i, step, cfg_.total_steps, dataset_.frames, qrng);
    if (std::find(targets.begin(), targets.end(), q) == targets.end()) targets.push_back(q);
  }

  const int m = cfg_.model.samples_per_ray;
  const int cross_p = cfg_.cross_rays > 0 ? std::min(cfg_.cross_rays, P) : P;
  const ExposureBundle cross_src = cross_p == P ? bundle : slice_bundle(bundle, cross_p, m);
  Tensor cross_gt = cross_p == P ? gt : slice_rows(gt, 0, cross_p);

  crosses.reserve(targets.size());
  for (int j : targets) crosses.push_back(render_cross_time(ctx, cross_src, j));
  for (const auto& ct : crosses) {
    if (ct.target_frame == i - 1) prev = &ct;
    if (ct.target_frame == i + 1) next = &ct;
  }

  if (cfg_.use_cross && !crosses.empty()) {
    t.cross = loss_cross(crosses, cross_gt);
  } else {
    t.cross = tape.constant_scalar(0.0);
  }

  PriorsRender priors = render_priors(ctx, bundle);
  if (!cfg_.use_evc) {  // averaging ablation uses the plain mean composites
    priors.depth_evc = priors.depth_avg;
    if (priors.has_flow) priors.flow_evc = priors.flow_avg;
  }
  DataLoss dl = loss_data(priors, gtd, gtf, flow_valid);
  t.data_depth = dl.depth;
  t.data_flow = dl.flow;

  SceneFlowLoss sf = loss_scene_flow(ctx, cross_src, {prev, next});
  t.cyc = sf.cyc;
  t.smooth = sf.smooth;
  t.min = sf.min;
  t.wreg = sf.wreg;

  t.total = total_loss(t, cfg_.weights, step);
  return t;
}

LossReport Trainer::train_step(std::int64_t step) {
  Tape tape(&pool_);
  LossTerms terms = forward(tape, step);
  LossReport report = report_from_terms(terms, cfg_.weights, step);
  if (!std::isfinite(report.total))
    throw TrainDivergence("non-finite total loss at step " + std::to_string(step), report);
  model_.store().zero_grad();
  tape.backward(terms.total);
  adam_.step();
  for (const auto& p : model_.store().all())
    for (double v : p.value)
      if (!std::isfinite(v))
        throw TrainDivergence("non-finite parameter after step " + std::to_string(step), report);
  return report;
}

void Trainer::run(const std::string& out_dir,
                  const std::function<void(std::int64_t, const LossReport&)>& on_step) {
  namespace fs = std::filesystem;
  std::ofstream csv;
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    csv.open(out_dir + "/loss_log.csv", std::ios::trunc);
    csv << LossReport::csv_header() << "\n";
  }
  auto checkpoint = [&](std::int64_t step) {
    if (out_dir.empty()) return;
    AdamStateBlob blob = adam_.state();
    save_checkpoint(out_dir + "/ckpt_" + std::to_string(step), model_, step,
                    train_config_to_json(cfg_), &blob);
  };
  if (cfg_.total_steps == 0) checkpoint(0);
  for (std::int64_t step = 0; step < cfg_.total_steps; ++step) {
    const LossReport r = train_step(step);
    if (csv.is_open()) csv << r.csv_row(step) << "\n";
    if (on_step) on_step(step, r);
    if (cfg_.checkpoint_interval > 0 && (step + 1) % cfg_.checkpoint_interval == 0 &&
        step + 1 != cfg_.total_steps)
      checkpoint(step + 1);
  }
  if (cfg_.total_steps > 0) checkpoint(cfg_.total_steps);
  if (csv.is_open()) csv.flush();
}

}  // namespace blurf
