// Copyright (c) 2026 The blurf Authors.
// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "blurf/encoding.hpp"
#include "blurf/fields.hpp"
#include "blurf/util.hpp"

using namespace blurf;

namespace {

Model make_toy_model(bool use_static = true) {
  ModelConfig cfg;
  cfg.dynamic_mlp = MlpConfig{8, 2, -1};
  cfg.static_mlp = MlpConfig{8, 2, -1};
  cfg.color_head_width = 8;
  cfg.l_pos = 2;
  cfg.l_dir = 1;
  cfg.l_time = 1;
  cfg.n = 2;
  cfg.frames = 2;
  cfg.K = 2;
  cfg.learnable_basis = true;
  cfg.use_static = use_static;
  cfg.samples_per_ray = 4;
  std::vector<Pose> s(2), e(2);
  e[0].translation = Vec3(0.1, 0, 0);
  s[1].translation = Vec3(0.2, 0, 0);
  e[1].translation = Vec3(0.3, 0, 0);
  return Model(cfg, s, e, 42);
}

std::vector<double> random_points(int rows, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
  Rng rng(seed);
  std::vector<double> v(std::size_t(rows) * 3);
  for (auto& x : v) x = rng.uniform(lo, hi);
  return v;
}

std::vector<double> random_dirs(int rows, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> v(std::size_t(rows) * 3);
  for (int r = 0; r < rows; ++r) {
    Vec3 d(rng.normal(), rng.normal(), rng.normal());
    d.normalize();
    for (int a = 0; a < 3; ++a) v[std::size_t(r) * 3 + a] = d[a];
  }
  return v;
}

}  // namespace

TEST_CASE("encoding: L = 0 passthrough, zeros, dimension arithmetic") {
  Tape tape;
  std::vector<double> x = {0.3, -0.7, 0.2};
  Tensor t = tape.constant({1, 3}, x);
  CHECK(encode(t, 0).val() == x);

  Tensor z = tape.zeros({1, 3});
  const auto& enc = encode(z, 2).val();
  // layout: [x, sin(pi x), cos(pi x), sin(2pi x), cos(2pi x)]
  CHECK(int(enc.size()) == encoding_dim(3, 2));
  for (int d = 0; d < 3; ++d) {
    CHECK(enc[std::size_t(d)] == 0.0);
    CHECK(enc[std::size_t(3 + d)] == 0.0);       // sin
    CHECK(enc[std::size_t(6 + d)] == 1.0);       // cos
    CHECK(enc[std::size_t(9 + d)] == 0.0);
    CHECK(enc[std::size_t(12 + d)] == 1.0);
  }

  CHECK(encoding_dim(3, 10) == 63);
  Tensor full = encode(tape.constant({1, 3}, x), 10);
  CHECK(full.shape().cols == 63);

  // graph and plain paths agree
  const auto plain = encode_plain(x, 3, 10);
  double err = 0.0;
  for (std::size_t i = 0; i < plain.size(); ++i)
    err = std::max(err, std::fabs(plain[i] - full.val()[i]));
  CHECK(err == 0.0);
}

TEST_CASE("dynamic field: density/psi/weights ignore direction; ranges hold") {
  Model model = make_toy_model();
  MlpFieldProvider field(model);
  const int rows = 64;
  const auto pts = random_points(rows, 1);

  Tape tape;
  Tensor x = tape.constant({rows, 3}, pts);
  Tensor d1 = tape.constant({rows, 3}, random_dirs(rows, 2));
  Tensor d2 = tape.constant({rows, 3}, random_dirs(rows, 3));
  DynOut a = field.dynamic(tape, x, d1, 0.0);
  DynOut b = field.dynamic(tape, x, d2, 0.0);
  CHECK(a.sigma.val() == b.sigma.val());
  CHECK(a.psi.val() == b.psi.val());
  CHECK(a.w_fw.val() == b.w_fw.val());
  CHECK(a.color.val() != b.color.val());

  for (double v : a.sigma.val()) CHECK(v >= 0.0);
  for (double v : a.color.val()) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
  for (double v : a.w_fw.val()) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("ranges hold over 1000 random inputs") {
  Model model = make_toy_model();
  MlpFieldProvider field(model);
  const int rows = 1000;
  Tape tape;
  Tensor x = tape.constant({rows, 3}, random_points(rows, 4, -3.0, 3.0));
  Tensor d = tape.constant({rows, 3}, random_dirs(rows, 5));
  DynOut out = field.dynamic(tape, x, d, 1.0);
  for (double v : out.sigma.val()) CHECK(v >= 0.0);
  for (double v : out.w_bw.val()) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
  StatOut st = field.static_field(tape, x, d);
  for (double v : st.sigma.val()) CHECK(v >= 0.0);
  for (double v : st.blend_v.val()) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("static field: sigma and blend weight ignore direction") {
  Model model = make_toy_model();
  MlpFieldProvider field(model);
  const int rows = 32;
  Tape tape;
  Tensor x = tape.constant({rows, 3}, random_points(rows, 6));
  StatOut a = field.static_field(tape, x, tape.constant({rows, 3}, random_dirs(rows, 7)));
  StatOut b = field.static_field(tape, x, tape.constant({rows, 3}, random_dirs(rows, 8)));
  CHECK(a.sigma.val() == b.sigma.val());
  CHECK(a.blend_v.val() == b.blend_v.val());
}

TEST_CASE("disocclusion weights start near zero") {
  Model model = make_toy_model();
  MlpFieldProvider field(model);
  Tape tape;
  Tensor x = tape.constant({16, 3}, random_points(16, 9));
  Tensor d = tape.constant({16, 3}, random_dirs(16, 10));
  DynOut out = field.dynamic(tape, x, d, 0.5);
  for (double v : out.w_fw.val()) CHECK(v < 0.4);
  for (double v : out.w_bw.val()) CHECK(v < 0.4);
}

TEST_CASE("blend: v = 0 keeps dynamic, v = 1 keeps static, v = 0.5 mixes") {
  Tape tape;
  DynOut dyn;
  dyn.color = tape.constant({1, 3}, {1.0, 0.0, 0.0});
  dyn.sigma = tape.constant({1, 1}, {2.0});
  StatOut st;
  st.color = tape.constant({1, 3}, {0.0, 1.0, 0.0});
  st.sigma = tape.constant({1, 1}, {4.0});

  Tensor c, s;
  st.blend_v = tape.constant({1, 1}, {0.0});
  blend(dyn, st, &c, &s);
  CHECK(c.val() == dyn.color.val());
  CHECK(s.val() == dyn.sigma.val());

  st.blend_v = tape.constant({1, 1}, {1.0});
  blend(dyn, st, &c, &s);
  CHECK(c.val() == st.color.val());
  CHECK(s.val() == st.sigma.val());

  st.blend_v = tape.constant({1, 1}, {0.5});
  blend(dyn, st, &c, &s);
  CHECK(c.val()[0] == doctest::Approx(0.5));
  CHECK(c.val()[1] == doctest::Approx(0.5));
  CHECK(c.val()[2] == doctest::Approx(0.0));
  CHECK(s.val()[0] == doctest::Approx(3.0));
}

TEST_CASE("blend is a convex combination: outputs within input extremes") {
  Model model = make_toy_model();
  MlpFieldProvider field(model);
  const int rows = 64;
  Tape tape;
  Tensor x = tape.constant({rows, 3}, random_points(rows, 11));
  Tensor d = tape.constant({rows, 3}, random_dirs(rows, 12));
  DynOut dyn = field.dynamic(tape, x, d, 0.25);
  StatOut st = field.static_field(tape, x, d);
  Tensor c, s;
  blend(dyn, st, &c, &s);
  for (std::size_t i = 0; i < c.val().size(); ++i) {
    const double lo = std::min(dyn.color.val()[i], st.color.val()[i]);
    const double hi = std::max(dyn.color.val()[i], st.color.val()[i]);
    CHECK(c.val()[i] >= lo - 1e-12);
    CHECK(c.val()[i] <= hi + 1e-12);
  }
}

TEST_CASE("field queries reject non-finite positions") {
  Model model = make_toy_model();
  MlpFieldProvider field(model);
  Tape tape;
  std::vector<double> bad = {0.0, 0.0, std::numeric_limits<double>::quiet_NaN()};
  Tensor x = tape.constant({1, 3}, bad);
  Tensor d = tape.constant({1, 3}, {0.0, 0.0, 1.0});
  CHECK_THROWS_AS(field.dynamic(tape, x, d, 0.0), std::domain_error);
}

TEST_CASE("determinism: identical queries give bitwise-identical outputs") {
  Model model = make_toy_model();
  MlpFieldProvider field(model);
  const auto pts = random_points(32, 13);
  const auto dirs = random_dirs(32, 14);
  std::vector<double> first;
  for (int rep = 0; rep < 2; ++rep) {
    Tape tape;
    DynOut out = field.dynamic(tape, tape.constant({32, 3}, pts), tape.constant({32, 3}, dirs), 0.75);
    if (rep == 0) {
      first = out.color.val();
    } else {
      CHECK(out.color.val() == first);
    }
  }
}

TEST_CASE("field gradients match finite differences on a tiny config") {
  Model model = make_toy_model();
  MlpFieldProvider field(model);
  const int rows = 3;
  const auto pts = random_points(rows, 15);
  const auto dirs = random_dirs(rows, 16);

  auto eval = [&](bool with_grad) {
    Tape tape;
    Tensor x = tape.constant({rows, 3}, pts);
    Tensor d = tape.constant({rows, 3}, dirs);
    DynOut dyn = field.dynamic(tape, x, d, 0.5);
    StatOut st = field.static_field(tape, x, d);
    Tensor score = add(mean_all(dyn.color), mean_all(dyn.sigma));
    score = add(score, mean_all(dyn.psi));
    score = add(score, mean_all(dyn.w_fw));
    score = add(score, add(mean_all(st.color), mean_all(st.blend_v)));
    const double v = score.val()[0];
    if (with_grad) tape.backward(score);
    return v;
  };

  model.store().zero_grad();
  eval(true);
  std::vector<std::vector<double>> analytic;
  for (const auto& p : model.store().all()) analytic.push_back(p.grad);

  const double h = 1e-6;
  double max_rel = 0.0;
  auto& params = model.store().all();
  for (std::size_t k = 0; k < params.size(); ++k) {
    if (params[k].name.rfind("pose.", 0) == 0) continue;  // poses unused here
    Rng rng(100 + k);
    for (int probe = 0; probe < 5; ++probe) {
      const std::size_t i = std::size_t(rng.uniform_int(0, int(params[k].value.size()) - 1));
      const double saved = params[k].value[i];
      params[k].value[i] = saved + h;
      const double fp = eval(false);
      params[k].value[i] = saved - h;
      const double fm = eval(false);
      params[k].value[i] = saved;
      const double fd = (fp - fm) / (2 * h);
      const double an = analytic[k][i];
      max_rel = std::max(max_rel,
                         std::fabs(fd - an) / std::max({std::fabs(fd), std::fabs(an), 1e-6}));
    }
  }
  CHECK(max_rel < 1e-3);
}
