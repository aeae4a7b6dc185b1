// Copyright (c) 2026 The blurf Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <string>

#include "blurf/losses.hpp"
#include "blurf/model.hpp"
#include "blurf/renderer.hpp"
#include "blurf/synthdata.hpp"

namespace blurf {

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double lr_mlp = 5e-4;
  double lr_camera = 1e-3;
  double lr_basis = 1.25e-4;
};

/// Standard bias-corrected Adam with per-group learning rates. Tensors whose
/// gradient turns non-finite are skipped for that step and counted.
class AdamOptimizer {
 public:
  AdamOptimizer(ParamStore& store, const AdamConfig& cfg);
  void step();
  std::int64_t step_count() const { return t_; }
  std::int64_t skipped_nonfinite() const { return skipped_; }
  AdamStateBlob state() const;
  void set_state(const AdamStateBlob& blob);

 private:
  ParamStore& store_;
  AdamConfig cfg_;
  std::vector<std::vector<double>> m_, v_;
  std::int64_t t_ = 0;
  std::int64_t skipped_ = 0;
};

struct TrainConfig {
  std::int64_t total_steps = 20000;
  int rays_per_batch = 1024;
  std::uint64_t seed = 1;
  bool deterministic = true;
  bool use_cross = true;
  bool use_evc = true;
  /// Rays per batch carrying the cross-time and scene-flow terms
  /// (0 = the whole batch). The losses are means, so scale is unchanged.
  int cross_rays = 0;
  std::int64_t checkpoint_interval = 5000;
  ModelConfig model;
  LossWeights weights;
  AdamConfig adam;
};

std::string train_config_to_json(const TrainConfig& c);
TrainConfig train_config_from_json(const std::string& text);

/// Radius of the curriculum window around the source frame:
/// max(2, round(2 + (N-2) * min(1, step / (0.5 * total)))).
int curriculum_radius(std::int64_t step, std::int64_t total_steps, int frames);

/// Uniform draw over frames != i within the radius, clipped to [1, N].
int curriculum_q(int i, std::int64_t step, std::int64_t total_steps, int frames, Rng& rng);

/// Error raised when the total loss turns non-finite; carries the last report
/// so the offending term is visible.
struct TrainDivergence : std::runtime_error {
  LossReport report;
  explicit TrainDivergence(const std::string& what, LossReport r)
      : std::runtime_error(what), report(r) {}
};

class Trainer {
 public:
  Trainer(Model& model, const Dataset& dataset, const TrainConfig& cfg);

  /// Builds the full per-step loss graph. Deterministic given (params, step).
  LossTerms forward(Tape& tape, std::int64_t step);

  /// forward + backward + Adam; returns the step's report.
  LossReport train_step(std::int64_t step);

  /// Runs steps [start, total); emits CSV rows and periodic checkpoints into
  /// out_dir when it is non-empty.
  void run(const std::string& out_dir,
           const std::function<void(std::int64_t, const LossReport&)>& on_step = {});

  AdamOptimizer& optimizer() { return adam_; }
  Model& model() { return model_; }
  BufferPool& pool() { return pool_; }

 private:
  PixelBatch sample_batch(std::int64_t step) const;

  Model& model_;
  const Dataset& dataset_;
  TrainConfig cfg_;
  MlpFieldProvider field_;
  ModelPoseProvider poses_;
  AdamOptimizer adam_;
  BufferPool pool_;
};

}  // namespace blurf
