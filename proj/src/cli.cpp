// Copyright (c) 2026 The blurf Authors.
// SPDX-License-Identifier: Apache-2.0
#include "blurf/cli.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "blurf/checks.hpp"
#include "blurf/kernels.hpp"
#include "blurf/metrics.hpp"
#include "blurf/report.hpp"

namespace blurf {

namespace fs = std::filesystem;
using nlohmann::json;

Image render_full_view(Model& model, const Dataset& ds, int frame, double alpha, RenderMode mode,
                       int samples_m, int chunk) {
  MlpFieldProvider field(model);
  ModelPoseProvider poses(model);
  const Camera& cam = ds.cam;
  Image out(cam.width, cam.height, 3);
  const int total = cam.width * cam.height;
  BufferPool pool;
  for (int off = 0; off < total; off += chunk) {
    Tape tape(&pool);
    RenderSettings rs;
    rs.samples_m = samples_m;
    rs.jitter = JitterMode::kMidpoint;
    RenderContext ctx(tape, field, poses, cam, ds.n, ds.frames, rs);
    PixelBatch px;
    px.frame = frame;
    const int count = std::min(chunk, total - off);
    for (int k = 0; k < count; ++k) {
      px.row.push_back((off + k) / cam.width);
      px.col.push_back((off + k) % cam.width);
    }
    PoseNodes pose = poses.pose_alpha(tape, frame, alpha);
    const double t = (frame - 1) * ds.n + alpha * (ds.n - 1);
    RenderOutput r = render_at(ctx, px, pose, t, mode);
    const auto& v = r.color.val();
    for (int k = 0; k < count; ++k)
      for (int ch = 0; ch < 3; ++ch) out.at(px.row[k], px.col[k], ch) = v[std::size_t(k) * 3 + ch];
  }
  return out;
}

PriorMaps render_prior_maps(Model& model, const Dataset& ds, int frame, int samples_m, int chunk) {
  MlpFieldProvider field(model);
  ModelPoseProvider poses(model);
  const Camera& cam = ds.cam;
  PriorMaps out;
  out.depth = Image(cam.width, cam.height, 1);
  const bool has_flow = frame < ds.frames;
  if (has_flow) out.flow = Image(cam.width, cam.height, 2);
  const int total = cam.width * cam.height;
  BufferPool pool;
  for (int off = 0; off < total; off += chunk) {
    Tape tape(&pool);
    RenderSettings rs;
    rs.samples_m = samples_m;
    rs.jitter = JitterMode::kMidpoint;
    RenderContext ctx(tape, field, poses, cam, ds.n, ds.frames, rs);
    PixelBatch px;
    px.frame = frame;
    const int count = std::min(chunk, total - off);
    for (int k = 0; k < count; ++k) {
      px.row.push_back((off + k) / cam.width);
      px.col.push_back((off + k) % cam.width);
    }
    ExposureBundle bundle = render_exposure_bundle(ctx, px, model.config().use_static);
    PriorsRender pr = render_priors(ctx, bundle);
    const auto& dv = pr.depth_evc.val();
    for (int k = 0; k < count; ++k) out.depth.at(px.row[k], px.col[k]) = dv[std::size_t(k)];
    if (has_flow && pr.has_flow) {
      const auto& fv = pr.flow_evc.val();
      for (int k = 0; k < count; ++k) {
        out.flow->at(px.row[k], px.col[k], 0) = fv[std::size_t(k) * 2];
        out.flow->at(px.row[k], px.col[k], 1) = fv[std::size_t(k) * 2 + 1];
      }
    }
  }
  return out;
}

std::string EvalReport::to_json() const {
  json j;
  j["frames"] = json::array();
  for (std::size_t i = 0; i < frame.size(); ++i)
    j["frames"].push_back(json{{"frame", frame[i]}, {"psnr", psnr_v[i]}, {"ssim", ssim_v[i]}});
  j["mean_psnr"] = mean_psnr;
  j["mean_ssim"] = mean_ssim;
  return j.dump(2);
}

std::string EvalReport::to_csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "frame,psnr,ssim\n";
  for (std::size_t i = 0; i < frame.size(); ++i)
    os << frame[i] << ',' << psnr_v[i] << ',' << ssim_v[i] << "\n";
  os << "mean," << mean_psnr << ',' << mean_ssim << "\n";
  return os.str();
}

namespace {

EvalReport finish_report(EvalReport r) {
  double sp = 0, ss = 0;
  for (std::size_t i = 0; i < r.frame.size(); ++i) {
    sp += r.psnr_v[i];
    ss += r.ssim_v[i];
  }
  r.mean_psnr = r.frame.empty() ? 0.0 : sp / double(r.frame.size());
  r.mean_ssim = r.frame.empty() ? 0.0 : ss / double(r.frame.size());
  return r;
}

}  // namespace

EvalReport evaluate_model(Model& model, const Dataset& ds, int samples_m, int chunk) {
  EvalReport r;
  for (int i = 1; i <= ds.frames; ++i) {
    const Image render = render_full_view(model, ds, i, 0.5, RenderMode::kCombined, samples_m, chunk);
    r.frame.push_back(i);
    r.psnr_v.push_back(psnr(render, ds.data[std::size_t(i - 1)].sharp));
    r.ssim_v.push_back(ssim(render, ds.data[std::size_t(i - 1)].sharp));
  }
  return finish_report(std::move(r));
}

EvalReport evaluate_baseline(const Dataset& ds) {
  EvalReport r;
  for (int i = 1; i <= ds.frames; ++i) {
    r.frame.push_back(i);
    r.psnr_v.push_back(psnr(ds.data[std::size_t(i - 1)].blurry, ds.data[std::size_t(i - 1)].sharp));
    r.ssim_v.push_back(ssim(ds.data[std::size_t(i - 1)].blurry, ds.data[std::size_t(i - 1)].sharp));
  }
  return finish_report(std::move(r));
}

// ---------------------------------------------------------------------------

namespace {

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

Model load_model_for(const Dataset& ds, const std::string& ckpt_path, TrainConfig* cfg_out) {
  CheckpointData ckpt = load_checkpoint(ckpt_path);
  TrainConfig cfg = train_config_from_json(ckpt.config_json);
  std::vector<Pose> starts, ends;
  for (const auto& fd : ds.data) {
    starts.push_back(fd.pose_start);
    ends.push_back(fd.pose_end);
  }
  if (cfg_out) *cfg_out = cfg;
  return model_from_checkpoint(ckpt, cfg.model, starts, ends);
}

int cmd_synth(const std::string& scene, const std::string& script_path, const std::string& out,
              bool corrupt) {
  Timer timer;
  SceneScript sc;
  if (!script_path.empty()) {
    std::ifstream is(script_path);
    if (!is) throw std::runtime_error("cannot read script: " + script_path);
    std::stringstream buf;
    buf << is.rdbuf();
    sc = script_from_json(buf.str());
  } else {
    sc = script_by_name(scene);
  }
  if (corrupt) sc.corrupt_priors = true;
  generate_dataset(sc, out);
  RunRecord rec;
  rec.command = "synth";
  rec.config_json = script_to_json(sc);
  rec.wall_time_s = timer.seconds();
  rec.threads = kernels::max_threads();
  write_run_record(out, rec);
  std::cout << "wrote " << sc.frames << " frames to " << out << "\n";
  return 0;
}

int cmd_train(const std::string& data_dir, const std::string& out, const std::string& config_path,
              std::uint64_t seed, bool seed_set, std::int64_t steps, bool deterministic) {
  Timer timer;
  Dataset ds = load_dataset(data_dir);
  TrainConfig cfg;
  if (!config_path.empty()) {
    std::ifstream is(config_path);
    if (!is) throw std::runtime_error("cannot read config: " + config_path);
    std::stringstream buf;
    buf << is.rdbuf();
    cfg = train_config_from_json(buf.str());
  }
  cfg.model.frames = ds.frames;
  cfg.model.n = ds.n;
  cfg.model.near_s = ds.cam.near_s;
  cfg.model.far_s = ds.cam.far_s;
  if (seed_set) cfg.seed = seed;
  if (steps >= 0) cfg.total_steps = steps;
  cfg.deterministic = deterministic;

  std::vector<Pose> starts, ends;
  for (const auto& fd : ds.data) {
    starts.push_back(fd.pose_start);
    ends.push_back(fd.pose_end);
  }
  Model model(cfg.model, starts, ends, cfg.seed);
  Trainer trainer(model, ds, cfg);
  const std::int64_t report_every = std::max<std::int64_t>(1, cfg.total_steps / 20);
  trainer.run(out, [&](std::int64_t step, const LossReport& r) {
    if ((step + 1) % report_every == 0)
      std::cout << "step " << (step + 1) << "/" << cfg.total_steps << " total " << r.total << "\n";
  });

  RunRecord rec;
  rec.command = "train";
  rec.config_json = train_config_to_json(cfg);
  rec.seed = cfg.seed;
  rec.wall_time_s = timer.seconds();
  rec.threads = kernels::max_threads();
  write_run_record(out, rec);
  return 0;
}

int cmd_render(const std::string& data_dir, const std::string& ckpt, const std::string& out,
               int frame, const std::string& mode_name, int samples) {
  Timer timer;
  Dataset ds = load_dataset(data_dir);
  TrainConfig cfg;
  Model model = load_model_for(ds, ckpt, &cfg);
  RenderMode mode = RenderMode::kCombined;
  if (mode_name == "dynamic") mode = RenderMode::kDynamic;
  if (mode_name == "static") mode = RenderMode::kStatic;
  const int m = samples > 0 ? samples : cfg.model.samples_per_ray;
  fs::create_directories(out);
  const int lo = frame > 0 ? frame : 1;
  const int hi = frame > 0 ? frame : ds.frames;
  for (int i = lo; i <= hi; ++i) {
    char idx[8];
    std::snprintf(idx, sizeof(idx), "%03d", i);
    const Image color = render_full_view(model, ds, i, 0.5, mode, m);
    save_png(out + "/color_" + std::string(idx) + ".png", color);
    const PriorMaps maps = render_prior_maps(model, ds, i, m);
    save_pfm(out + "/depth_" + std::string(idx) + ".pfm", maps.depth);
    if (maps.flow) save_pfm(out + "/flow_" + std::string(idx) + ".pfm", *maps.flow);
  }
  RunRecord rec;
  rec.command = "render";
  rec.config_json = train_config_to_json(cfg);
  rec.seed = cfg.seed;
  rec.wall_time_s = timer.seconds();
  rec.threads = kernels::max_threads();
  write_run_record(out, rec);
  return 0;
}

int cmd_eval(const std::string& data_dir, const std::string& ckpt, const std::string& out,
             bool baseline, int samples) {
  Timer timer;
  Dataset ds = load_dataset(data_dir);
  EvalReport report;
  std::string config_json = "{}";
  std::uint64_t seed = 0;
  if (baseline) {
    report = evaluate_baseline(ds);
  } else {
    TrainConfig cfg;
    Model model = load_model_for(ds, ckpt, &cfg);
    const int m = samples > 0 ? samples : cfg.model.samples_per_ray;
    report = evaluate_model(model, ds, m);
    config_json = train_config_to_json(cfg);
    seed = cfg.seed;
  }
  fs::create_directories(out);
  {
    std::ofstream os(out + "/eval.json");
    os << report.to_json() << "\n";
  }
  {
    std::ofstream os(out + "/eval.csv");
    os << report.to_csv();
  }
  std::cout << (baseline ? "baseline" : "model") << " mean PSNR " << report.mean_psnr
            << " dB, mean SSIM " << report.mean_ssim << "\n";
  RunRecord rec;
  rec.command = baseline ? "eval --baseline" : "eval";
  rec.config_json = config_json;
  rec.seed = seed;
  rec.wall_time_s = timer.seconds();
  rec.threads = kernels::max_threads();
  write_run_record(out, rec);
  return 0;
}

int cmd_check(const std::string& out) {
  Timer timer;
  const auto results = run_fast_checks();
  bool all = true;
  for (const auto& r : results) {
    std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.name << " (" << r.detail << ", "
              << r.seconds << " s)\n";
    all = all && r.pass;
  }
  if (!out.empty()) {
    RunRecord rec;
    rec.command = "check";
    rec.config_json = "{}";
    rec.wall_time_s = timer.seconds();
    rec.threads = kernels::max_threads();
    write_run_record(out, rec);
  }
  return all ? 0 : 1;
}

}  // namespace

int cli_main(int argc, char** argv) {
  kernels::configure_threads();
  CLI::App app{"space-time radiance fields from motion-blurred sequences"};
  app.require_subcommand(1);

  std::string scene = "moving-square", script_path, out_dir, data_dir, config_path, ckpt_path;
  std::string mode_name = "combined";
  std::uint64_t seed = 1;
  std::int64_t steps = -1;
  bool corrupt = false, deterministic = true, baseline = false;
  int frame = -1, samples = -1;

  auto* synth = app.add_subcommand("synth", "generate a synthetic blurry dataset");
  synth->add_option("--scene", scene, "built-in scene name");
  synth->add_option("--script", script_path, "scene script JSON");
  synth->add_option("--out", out_dir, "output directory")->required();
  synth->add_flag("--corrupt", corrupt, "apply edge-dilation corruption to priors");

  auto* train = app.add_subcommand("train", "optimize a model on a dataset");
  train->add_option("--data", data_dir, "dataset directory")->required();
  train->add_option("--out", out_dir, "output directory")->required();
  train->add_option("--config", config_path, "train config JSON");
  auto* seed_opt = train->add_option("--seed", seed, "RNG seed");
  train->add_option("--steps", steps, "override step count");
  train->add_flag("--deterministic,!--no-deterministic", deterministic, "seeded deterministic run");

  auto* render = app.add_subcommand("render", "render color/depth/flow maps from a checkpoint");
  render->add_option("--data", data_dir, "dataset directory")->required();
  render->add_option("--ckpt", ckpt_path, "checkpoint file")->required();
  render->add_option("--out", out_dir, "output directory")->required();
  render->add_option("--frame", frame, "frame index (default: all)");
  render->add_option("--mode", mode_name, "dynamic | static | combined");
  render->add_option("--samples", samples, "samples per ray");

  auto* eval = app.add_subcommand("eval", "mid-exposure sharp-view evaluation");
  eval->add_option("--data", data_dir, "dataset directory")->required();
  eval->add_option("--ckpt", ckpt_path, "checkpoint file");
  eval->add_option("--out", out_dir, "output directory")->required();
  eval->add_flag("--baseline", baseline, "evaluate the blurry inputs instead of a checkpoint");
  eval->add_option("--samples", samples, "samples per ray");

  auto* check = app.add_subcommand("check", "run the property suite");
  check->add_option("--out", out_dir, "directory for the run record");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (synth->parsed()) return cmd_synth(scene, script_path, out_dir, corrupt);
    if (train->parsed())
      return cmd_train(data_dir, out_dir, config_path, seed, seed_opt->count() > 0, steps,
                       deterministic);
    if (render->parsed()) return cmd_render(data_dir, ckpt_path, out_dir, frame, mode_name, samples);
    if (eval->parsed()) {
      if (!baseline && ckpt_path.empty()) {
        std::cerr << "eval: --ckpt required unless --baseline\n";
        return 2;
      }
      return cmd_eval(data_dir, ckpt_path, out_dir, baseline, samples);
    }
    if (check->parsed()) return cmd_check(out_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace blurf
