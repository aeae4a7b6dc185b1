// Copyright (c) 2026 The blurf Authors.
// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "blurf/checks.hpp"
#include "blurf/training.hpp"
#include "blurf/util.hpp"

using namespace blurf;

namespace {

TrainConfig tiny_train_config(int frames, int n) {
  TrainConfig c = gradient_toy_config();
  c.model.frames = frames;
  c.model.n = n;
  c.rays_per_batch = 12;
  c.model.samples_per_ray = 8;
  c.total_steps = 40;
  c.checkpoint_interval = 40;
  return c;
}

Model model_for(const Dataset& ds, const TrainConfig& cfg) {
  std::vector<Pose> s, e;
  for (const auto& fd : ds.data) {
    s.push_back(fd.pose_start);
    e.push_back(fd.pose_end);
  }
  return Model(cfg.model, s, e, cfg.seed);
}

}  // namespace

TEST_CASE("adam: zero gradients leave parameters unchanged") {
  ParamStore store;
  ParamTensor& p = store.add("w", {2, 2}, ParamGroup::kMlp);
  p.value = {1.0, -2.0, 3.0, 4.0};
  AdamOptimizer opt(store, AdamConfig{});
  store.zero_grad();
  opt.step();
  CHECK(p.value == std::vector<double>{1.0, -2.0, 3.0, 4.0});
}

TEST_CASE("adam: first bias-corrected step moves by about lr") {
  ParamStore store;
  ParamTensor& p = store.add("w", {1, 1}, ParamGroup::kMlp);
  p.value = {0.0};
  AdamConfig cfg;
  cfg.lr_mlp = 0.1;
  AdamOptimizer opt(store, cfg);
  p.grad = {1.0};
  opt.step();
  CHECK(p.value[0] == doctest::Approx(-0.1).epsilon(1e-6));
}

TEST_CASE("adam: per-group learning rates are applied") {
  ParamStore store;
  ParamTensor& mlp = store.add("m", {1, 1}, ParamGroup::kMlp);
  ParamTensor& cam = store.add("c", {1, 1}, ParamGroup::kCamera);
  ParamTensor& dct = store.add("d", {1, 1}, ParamGroup::kDctBasis);
  AdamConfig cfg;  // 5e-4 / 1e-3 / 1.25e-4
  AdamOptimizer opt(store, cfg);
  mlp.grad = {1.0};
  cam.grad = {1.0};
  dct.grad = {1.0};
  opt.step();
  CHECK(mlp.value[0] == doctest::Approx(-5e-4).epsilon(1e-6));
  CHECK(cam.value[0] == doctest::Approx(-1e-3).epsilon(1e-6));
  CHECK(dct.value[0] == doctest::Approx(-1.25e-4).epsilon(1e-6));
}

TEST_CASE("adam: non-finite gradients skip the tensor and are counted") {
  ParamStore store;
  ParamTensor& a = store.add("a", {1, 1}, ParamGroup::kMlp);
  ParamTensor& b = store.add("b", {1, 1}, ParamGroup::kMlp);
  a.value = {1.0};
  b.value = {1.0};
  AdamOptimizer opt(store, AdamConfig{});
  a.grad = {std::numeric_limits<double>::quiet_NaN()};
  b.grad = {1.0};
  opt.step();
  CHECK(a.value[0] == 1.0);
  CHECK(b.value[0] < 1.0);
  CHECK(opt.skipped_nonfinite() == 1);
}

TEST_CASE("adam: frozen tensors are not updated") {
  ParamStore store;
  ParamTensor& a = store.add("a", {1, 1}, ParamGroup::kCamera);
  a.value = {2.0};
  a.trainable = false;
  AdamOptimizer opt(store, AdamConfig{});
  a.grad = {1.0};
  opt.step();
  CHECK(a.value[0] == 2.0);
}

TEST_CASE("curriculum radius: initial window, full range, monotone growth") {
  const int N = 24;
  CHECK(curriculum_radius(0, 1000, N) == 2);
  CHECK(curriculum_radius(500, 1000, N) == N);
  CHECK(curriculum_radius(900, 1000, N) == N);
  int prev = 0;
  for (std::int64_t s = 0; s <= 1000; s += 50) {
    const int r = curriculum_radius(s, 1000, N);
    CHECK(r >= prev);
    prev = r;
  }
}

TEST_CASE("curriculum q: never the source frame, respects the window") {
  Rng rng(3);
  const int N = 24, i = 10;
  for (int trial = 0; trial < 200; ++trial) {
    const int q = curriculum_q(i, 0, 1000, N, rng);
    CHECK(q != i);
    CHECK(q >= i - 2);
    CHECK(q <= i + 2);
  }
  for (int trial = 0; trial < 50; ++trial) {
    const int q = curriculum_q(1, 0, 1000, N, rng);  // clipped at the start
    CHECK(q >= 1);
    CHECK(q <= 3);
    CHECK(q != 1);
  }
  bool far_seen = false;
  for (int trial = 0; trial < 400; ++trial)
    far_seen = far_seen || std::abs(curriculum_q(i, 600, 1000, N, rng) - i) > 5;
  CHECK(far_seen);
}

TEST_CASE("train config JSON round trip") {
  TrainConfig c;
  c.total_steps = 123;
  c.rays_per_batch = 17;
  c.model.l_pos = 5;
  c.weights.lambda_data = 0.25;
  c.adam.lr_camera = 2e-3;
  c.use_evc = false;
  const TrainConfig d = train_config_from_json(train_config_to_json(c));
  CHECK(d.total_steps == 123);
  CHECK(d.rays_per_batch == 17);
  CHECK(d.model.l_pos == 5);
  CHECK(d.weights.lambda_data == 0.25);
  CHECK(d.adam.lr_camera == 2e-3);
  CHECK_FALSE(d.use_evc);
}

TEST_CASE("zero-step training checkpoints the initialization") {
  namespace fs = std::filesystem;
  const std::string dir = fs::temp_directory_path() / "blurf_train0";
  fs::remove_all(dir);
  Dataset ds = gradient_toy_dataset();
  TrainConfig cfg = tiny_train_config(ds.frames, ds.n);
  cfg.total_steps = 0;
  Model model = model_for(ds, cfg);
  const auto init = model.store().all();
  Trainer trainer(model, ds, cfg);
  trainer.run(dir);
  const CheckpointData ckpt = load_checkpoint(dir + "/ckpt_0");
  CHECK(ckpt.step == 0);
  for (std::size_t i = 0; i < init.size(); ++i)
    CHECK(ckpt.params[i].value == init[i].value);
  fs::remove_all(dir);
}

TEST_CASE("checkpoint round trip restores parameters and optimizer state") {
  namespace fs = std::filesystem;
  const std::string dir = fs::temp_directory_path() / "blurf_ckpt_rt";
  fs::remove_all(dir);
  fs::create_directories(dir);
  Dataset ds = gradient_toy_dataset();
  TrainConfig cfg = tiny_train_config(ds.frames, ds.n);
  cfg.total_steps = 5;
  Model model = model_for(ds, cfg);
  Trainer trainer(model, ds, cfg);
  for (std::int64_t s = 0; s < 5; ++s) trainer.train_step(s);
  AdamStateBlob blob = trainer.optimizer().state();
  save_checkpoint(dir + "/ckpt", model, 5, train_config_to_json(cfg), &blob);

  const CheckpointData back = load_checkpoint(dir + "/ckpt");
  CHECK(back.step == 5);
  CHECK(back.has_adam);
  CHECK(back.adam.step == 5);
  Model restored = model_from_checkpoint(back, cfg.model,
                                         {ds.data[0].pose_start, ds.data[1].pose_start},
                                         {ds.data[0].pose_end, ds.data[1].pose_end});
  for (std::size_t i = 0; i < model.store().all().size(); ++i)
    CHECK(restored.store().all()[i].value == model.store().all()[i].value);
  CHECK_FALSE(restored.store().at(Model::twist_name(1, false)).trainable);
  fs::remove_all(dir);
}

TEST_CASE("deterministic replay: identical seeds give identical reports and params") {
  Dataset ds = gradient_toy_dataset();
  TrainConfig cfg = tiny_train_config(ds.frames, ds.n);
  cfg.total_steps = 25;

  std::vector<std::string> rows1, rows2;
  Model m1 = model_for(ds, cfg);
  Trainer t1(m1, ds, cfg);
  t1.run("", [&](std::int64_t s, const LossReport& r) { rows1.push_back(r.csv_row(s)); });
  Model m2 = model_for(ds, cfg);
  Trainer t2(m2, ds, cfg);
  t2.run("", [&](std::int64_t s, const LossReport& r) { rows2.push_back(r.csv_row(s)); });

  CHECK(rows1 == rows2);
  for (std::size_t i = 0; i < m1.store().all().size(); ++i)
    CHECK(m1.store().all()[i].value == m2.store().all()[i].value);
}

TEST_CASE("learnable basis moves after one step with a live gradient") {
  Dataset ds = gradient_toy_dataset();
  TrainConfig cfg = tiny_train_config(ds.frames, ds.n);
  Model model = model_for(ds, cfg);
  const std::vector<double> init = model.store().at("dct.basis").value;
  Trainer trainer(model, ds, cfg);
  for (std::int64_t s = 0; s < 3; ++s) trainer.train_step(s);
  CHECK(model.store().at("dct.basis").value != init);
}

TEST_CASE("lambda_data decays exactly by powers of the decay factor") {
  LossWeights w;
  w.lambda_data = 0.04;
  w.data_decay_interval = 100;
  for (int d = 0; d < 6; ++d)
    CHECK(lambda_data_at(w, 100 * d + 50) == 0.04 * std::pow(0.1, d));
}

TEST_CASE("short training on a static scene drives reconstruction down") {
  Dataset ds = build_dataset(tiny_static_script());
  TrainConfig cfg;
  cfg.total_steps = 800;
  cfg.rays_per_batch = 24;
  cfg.seed = 5;
  cfg.checkpoint_interval = 0;
  cfg.model.dynamic_mlp = MlpConfig{24, 3, -1};
  cfg.model.static_mlp = MlpConfig{24, 3, -1};
  cfg.model.color_head_width = 16;
  cfg.model.l_pos = 4;
  cfg.model.l_dir = 1;
  cfg.model.l_time = 2;
  cfg.model.n = ds.n;
  cfg.model.frames = ds.frames;
  cfg.model.K = 2;
  cfg.model.samples_per_ray = 12;
  cfg.model.near_s = 2.0;
  cfg.model.far_s = 9.0;
  cfg.weights.data_decay_interval = 200;

  Model model = model_for(ds, cfg);
  Trainer trainer(model, ds, cfg);
  std::vector<double> totals;
  trainer.run("", [&](std::int64_t, const LossReport& r) { totals.push_back(r.rgb_cb); });

  // 20-step moving average over window means: late training must sit well
  // below the start and never regress between coarse windows
  auto window_mean = [&](std::size_t lo, std::size_t hi) {
    double acc = 0.0;
    for (std::size_t i = lo; i < hi; ++i) acc += totals[i];
    return acc / double(hi - lo);
  };
  const double first = window_mean(0, 100);
  const double last = window_mean(totals.size() - 100, totals.size());
  CHECK(last < 0.5 * first);
  double prev = window_mean(0, 200);
  for (std::size_t w = 1; w < 4; ++w) {
    const double cur = window_mean(w * 200, (w + 1) * 200);
    CHECK(cur <= prev * 1.10);
    prev = cur;
  }
}
