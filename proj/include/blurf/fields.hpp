// Copyright (c) 2026 The blurf Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "blurf/model.hpp"
#include "blurf/tensor.hpp"

namespace blurf {

/// Per-sample dynamic field emission. Colors are sigmoid-squashed, density is
/// shifted-softplus, disocclusion weights are sigmoids; density, psi, and the
/// weights depend on (x, t) only, color additionally on d.
struct DynOut {
  Tensor color;  // R x 3 in [0,1]
  Tensor sigma;  // R x 1, >= 0
  Tensor psi;    // R x 3K
  Tensor w_fw;   // R x 1 in [0,1]
  Tensor w_bw;   // R x 1 in [0,1]
};

struct StatOut {
  Tensor color;    // R x 3
  Tensor sigma;    // R x 1
  Tensor blend_v;  // R x 1 in [0,1], depends on x only
};

/// Field evaluation interface used by the renderer; the trained model and the
/// scripted test fields both implement it. `t_flat` is the flattened global
/// timestamp in [0, nN).
class FieldProvider {
 public:
  virtual ~FieldProvider() = default;
  virtual DynOut dynamic(Tape& tape, Tensor x, Tensor d, double t_flat) = 0;
  virtual StatOut static_field(Tape& tape, Tensor x, Tensor d) = 0;
  virtual bool has_static() const { return true; }
  /// (nN x K) basis rows for trajectory evaluation.
  virtual Tensor basis_rows(Tape& tape) = 0;
  virtual const DctBasis& basis_meta() const = 0;
};

/// Model-backed provider; binds each parameter once per tape.
class MlpFieldProvider : public FieldProvider {
 public:
  explicit MlpFieldProvider(Model& model) : model_(model) {}
  DynOut dynamic(Tape& tape, Tensor x, Tensor d, double t_flat) override;
  StatOut static_field(Tape& tape, Tensor x, Tensor d) override;
  bool has_static() const override { return model_.config().use_static; }
  Tensor basis_rows(Tape& tape) override;
  const DctBasis& basis_meta() const override { return model_.basis_meta(); }

 private:
  Tensor weight(Tape& tape, const std::string& name);
  Tensor trunk(Tape& tape, const std::string& prefix, const MlpConfig& cfg, Tensor input);
  Model& model_;
  std::uint64_t bound_epoch_ = 0;
  std::map<std::string, Tensor> bound_;
};

/// Convex combination per the blending weight: dynamic * (1-v) + static * v.
void blend(const DynOut& dyn, const StatOut& st, Tensor* color_out, Tensor* sigma_out);

}  // namespace blurf
