// Copyright (c) 2026 The blurf Authors.
// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "blurf/cli.hpp"
#include "blurf/metrics.hpp"

using namespace blurf;
namespace fs = std::filesystem;

namespace {

int run_cli(std::vector<std::string> args) {
  std::vector<char*> argv;
  args.insert(args.begin(), "blurf");
  for (auto& a : args) argv.push_back(a.data());
  return cli_main(int(argv.size()), argv.data());
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string str() const { return path.string(); }
};

}  // namespace

TEST_CASE("cli: no arguments or unknown subcommands exit with code 2") {
  CHECK(run_cli({}) == 2);
  CHECK(run_cli({"frobnicate"}) == 2);
}

TEST_CASE("cli pipeline: synth, train, render, eval, baseline") {
  TempDir tmp("blurf_cli_pipeline");
  const std::string data = tmp.str() + "/data";
  const std::string run = tmp.str() + "/run";
  const std::string shots = tmp.str() + "/shots";
  const std::string eval_dir = tmp.str() + "/eval";

  // tiny-static keeps every stage fast
  REQUIRE(run_cli({"synth", "--scene", "tiny-static", "--out", data}) == 0);
  CHECK(fs::exists(data + "/manifest.json"));
  CHECK(fs::exists(data + "/blurry_001.png"));
  CHECK(fs::exists(data + "/depth_001.pfm"));
  CHECK(fs::exists(data + "/mask_001.png"));
  CHECK(fs::exists(data + "/run.json"));

  // a small config keeps the smoke training quick
  const std::string cfg_path = tmp.str() + "/cfg.json";
  {
    TrainConfig cfg;
    cfg.total_steps = 12;
    cfg.rays_per_batch = 8;
    cfg.checkpoint_interval = 12;
    cfg.model.dynamic_mlp = MlpConfig{12, 2, -1};
    cfg.model.static_mlp = MlpConfig{12, 2, -1};
    cfg.model.color_head_width = 8;
    cfg.model.l_pos = 2;
    cfg.model.l_dir = 1;
    cfg.model.l_time = 1;
    cfg.model.K = 2;
    cfg.model.samples_per_ray = 6;
    std::ofstream os(cfg_path);
    os << train_config_to_json(cfg);
  }
  REQUIRE(run_cli({"train", "--data", data, "--out", run, "--config", cfg_path, "--seed", "3"}) == 0);
  CHECK(fs::exists(run + "/ckpt_12"));
  CHECK(fs::exists(run + "/loss_log.csv"));
  CHECK(fs::exists(run + "/run.json"));
  {
    std::ifstream is(run + "/loss_log.csv");
    std::string header;
    std::getline(is, header);
    CHECK(header == LossReport::csv_header());
    int rows = 0;
    std::string line;
    while (std::getline(is, line))
      if (!line.empty()) ++rows;
    CHECK(rows == 12);
  }

  REQUIRE(run_cli({"render", "--data", data, "--ckpt", run + "/ckpt_12", "--out", shots,
                   "--frame", "1", "--samples", "6"}) == 0);
  CHECK(fs::exists(shots + "/color_001.png"));
  CHECK(fs::exists(shots + "/depth_001.pfm"));
  CHECK(fs::exists(shots + "/flow_001.pfm"));
  const Image depth = load_pfm(shots + "/depth_001.pfm");
  CHECK(depth.width == 32);

  REQUIRE(run_cli({"eval", "--data", data, "--ckpt", run + "/ckpt_12", "--out", eval_dir,
                   "--samples", "6"}) == 0);
  CHECK(fs::exists(eval_dir + "/eval.json"));
  CHECK(fs::exists(eval_dir + "/eval.csv"));

  REQUIRE(run_cli({"eval", "--data", data, "--out", eval_dir + "_base", "--baseline"}) == 0);
  CHECK(fs::exists(eval_dir + "_base/eval.json"));

  // eval without --ckpt and without --baseline is a usage error
  CHECK(run_cli({"eval", "--data", data, "--out", eval_dir + "_bad"}) == 2);
}

TEST_CASE("eval is byte-identical across repeated runs") {
  TempDir tmp("blurf_cli_det");
  const std::string data = tmp.str() + "/data";
  REQUIRE(run_cli({"synth", "--scene", "tiny-static", "--out", data}) == 0);
  Dataset ds = load_dataset(data);
  const EvalReport a = evaluate_baseline(ds);
  const EvalReport b = evaluate_baseline(ds);
  CHECK(a.to_json() == b.to_json());
  CHECK(a.to_csv() == b.to_csv());
}

TEST_CASE("baseline of a static scene is near-lossless") {
  TempDir tmp("blurf_cli_static");
  const std::string data = tmp.str() + "/data";
  REQUIRE(run_cli({"synth", "--scene", "tiny-static", "--out", data}) == 0);
  Dataset ds = load_dataset(data);
  const EvalReport base = evaluate_baseline(ds);
  CHECK(base.mean_psnr > 45.0);  // only quantization noise separates them
}
