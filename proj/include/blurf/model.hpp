// Copyright (c) 2026 The blurf Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <deque>
#include <map>
#include <string>
#include <vector>

#include "blurf/geometry.hpp"
#include "blurf/tensor.hpp"
#include "blurf/trajectory.hpp"

namespace blurf {

/// Optimizer grouping; each group carries its own learning rate.
enum class ParamGroup { kMlp, kCamera, kDctBasis };

struct ParamTensor {
  std::string name;
  Shape shape;
  std::vector<double> value;
  std::vector<double> grad;
  ParamGroup group = ParamGroup::kMlp;
  bool trainable = true;
};

class ParamStore {
 public:
  ParamTensor& add(const std::string& name, Shape shape, ParamGroup group);
  ParamTensor& at(const std::string& name);
  const ParamTensor& at(const std::string& name) const;
  bool contains(const std::string& name) const;

  std::deque<ParamTensor>& all() { return params_; }
  const std::deque<ParamTensor>& all() const { return params_; }

  void zero_grad();
  std::size_t total_size() const;

  /// Binds a parameter into a tape as a differentiable leaf.
  Tensor use(Tape& tape, const std::string& name);

 private:
  std::deque<ParamTensor> params_;  // stable references across adds
  std::map<std::string, std::size_t> index_;
};

struct MlpConfig {
  int width = 128;
  int depth = 4;
  int skip = 2;  // layer index receiving the input again; <0 disables
};

/// Everything the trainer optimizes plus the sizes needed to rebuild it.
struct ModelConfig {
  MlpConfig dynamic_mlp{128, 4, 2};
  MlpConfig static_mlp{128, 4, 2};
  int color_head_width = 64;
  int l_pos = 10;
  int l_dir = 4;
  int l_time = 6;
  int n = 7;   // timestamps per exposure
  int frames = 12;
  int K = 6;
  bool learnable_basis = true;
  bool use_static = true;
  int samples_per_ray = 64;
  double near_s = 1.0;
  double far_s = 10.0;
};

/// Trainable state: the two MLPs, per-frame start/end pose twists on fixed
/// initial poses, and the DCT basis table.
class Model {
 public:
  Model() = default;
  Model(const ModelConfig& cfg, const std::vector<Pose>& init_start,
        const std::vector<Pose>& init_end, std::uint64_t seed);

  const ModelConfig& config() const { return cfg_; }
  ParamStore& store() { return store_; }
  const ParamStore& store() const { return store_; }
  const DctBasis& basis_meta() const { return basis_meta_; }

  const Pose& init_start(int frame) const { return init_start_[frame - 1]; }
  const Pose& init_end(int frame) const { return init_end_[frame - 1]; }

  /// Current twist-corrected endpoint poses as plain values.
  Pose current_start(int frame) const;
  Pose current_end(int frame) const;

  static std::string twist_name(int frame, bool end);

 private:
  ModelConfig cfg_;
  ParamStore store_;
  DctBasis basis_meta_;
  std::vector<Pose> init_start_, init_end_;
};

// Checkpoint I/O. Versioned little-endian binary; includes optimizer moments
// when present so resumed runs continue bit-exactly.
struct AdamStateBlob {
  std::vector<std::vector<double>> m, v;
  std::int64_t step = 0;
};

void save_checkpoint(const std::string& path, const Model& model, std::int64_t step,
                     const std::string& config_json, const AdamStateBlob* adam);
struct CheckpointData {
  std::int64_t step = 0;
  std::string config_json;
  std::vector<ParamTensor> params;
  AdamStateBlob adam;
  bool has_adam = false;
};
CheckpointData load_checkpoint(const std::string& path);

/// Rebuilds a model from a checkpoint plus the dataset's initial poses.
Model model_from_checkpoint(const CheckpointData& ckpt, const ModelConfig& cfg,
                            const std::vector<Pose>& init_start, const std::vector<Pose>& init_end);

}  // namespace blurf
