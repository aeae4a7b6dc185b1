// Copyright (c) 2026 The blurf Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Serial reference vs OpenMP kernels, plus one end-to-end training step.

#include <benchmark/benchmark.h>

#include "blurf/checks.hpp"
#include "blurf/kernels.hpp"
#include "blurf/synthdata.hpp"
#include "blurf/training.hpp"
#include "blurf/util.hpp"

namespace {

using namespace blurf;

std::vector<double> randv(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform(-1.0, 1.0);
  return v;
}

void bm_matmul_serial(benchmark::State& state) {
  const int b = int(state.range(0)), i = 103, o = 64;
  const auto a = randv(std::size_t(b) * i, 1);
  const auto w = randv(std::size_t(i) * o, 2);
  std::vector<double> c(std::size_t(b) * o);
  for (auto _ : state) {
    kernels::matmul_serial(a.data(), w.data(), c.data(), b, i, o);
    benchmark::DoNotOptimize(c.data());
  }
  state.SetItemsProcessed(state.iterations() * 2 * std::int64_t(b) * i * o);
}

void bm_matmul_parallel(benchmark::State& state) {
  const int b = int(state.range(0)), i = 103, o = 64;
  const auto a = randv(std::size_t(b) * i, 1);
  const auto w = randv(std::size_t(i) * o, 2);
  std::vector<double> c(std::size_t(b) * o);
  kernels::set_parallel(true);
  for (auto _ : state) {
    kernels::matmul(a.data(), w.data(), c.data(), b, i, o);
    benchmark::DoNotOptimize(c.data());
  }
  state.SetItemsProcessed(state.iterations() * 2 * std::int64_t(b) * i * o);
}

void bm_cumsum_serial(benchmark::State& state) {
  const int rows = int(state.range(0)), m = 32;
  const auto in = randv(std::size_t(rows), 3);
  std::vector<double> out(std::size_t(rows), 0.0);
  for (auto _ : state) {
    kernels::block_cumsum_exclusive_serial(in.data(), out.data(), rows, 1, m);
    benchmark::DoNotOptimize(out.data());
  }
}

void bm_cumsum_parallel(benchmark::State& state) {
  const int rows = int(state.range(0)), m = 32;
  const auto in = randv(std::size_t(rows), 3);
  std::vector<double> out(std::size_t(rows), 0.0);
  kernels::set_parallel(true);
  for (auto _ : state) {
    kernels::block_cumsum_exclusive(in.data(), out.data(), rows, 1, m);
    benchmark::DoNotOptimize(out.data());
  }
}

void bm_train_step(benchmark::State& state) {
  Dataset ds = build_dataset(tiny_static_script());
  TrainConfig cfg = gradient_toy_config();
  cfg.model.frames = ds.frames;
  cfg.model.n = ds.n;
  cfg.rays_per_batch = int(state.range(0));
  cfg.model.samples_per_ray = 16;
  std::vector<Pose> s, e;
  for (const auto& fd : ds.data) {
    s.push_back(fd.pose_start);
    e.push_back(fd.pose_end);
  }
  Model model(cfg.model, s, e, cfg.seed);
  Trainer trainer(model, ds, cfg);
  std::int64_t step = 0;
  for (auto _ : state) trainer.train_step(step++);
}

}  // namespace

BENCHMARK(bm_matmul_serial)->Arg(512)->Arg(4096);
BENCHMARK(bm_matmul_parallel)->Arg(512)->Arg(4096);
BENCHMARK(bm_cumsum_serial)->Arg(65536);
BENCHMARK(bm_cumsum_parallel)->Arg(65536);
BENCHMARK(bm_train_step)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
