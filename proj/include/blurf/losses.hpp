// Copyright (c) 2026 The blurf Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "blurf/renderer.hpp"
#include "blurf/tensor.hpp"

namespace blurf {

struct LossWeights {
  double lambda_data = 0.04;
  double lambda_sf = 0.1;
  double lambda_st = 1.0;
  double lambda_cyc = 1.0;
  double lambda_w_reg = 0.01;  // L1 pull on the disocclusion weights
  double data_decay_factor = 0.1;
  std::int64_t data_decay_interval = 3333;
};

/// lambda_data multiplied by the decay factor once per completed interval.
double lambda_data_at(const LossWeights& w, std::int64_t step);

/// Mean squared error over all entries.
Tensor loss_rgb(Tensor pred, Tensor gt);

/// Static reconstruction restricted to static pixels: per-pixel channel-mean
/// squared error weighted by (1 - mask), normalized by the static pixel
/// count. mask[p] = 1 marks a dynamic pixel. All-dynamic batches give 0.
Tensor loss_rgb_static(Tensor pred, Tensor gt, const std::vector<double>& mask);

/// Sum over cross-time targets of mean_p( W_j(p) * channel-mean residual^2 ).
/// The disocclusion maps are detached: they gate the residual but are trained
/// only through the cycle loss and the weight regularizer.
Tensor loss_cross(const std::vector<CrossTimeRender>& crosses, Tensor gt);

/// L1 depth + L1 flow against priors, each averaged over its valid pixels.
struct DataLoss {
  Tensor depth;
  Tensor flow;  // zero scalar when no flow is supervised
};
DataLoss loss_data(const PriorsRender& priors, Tensor gt_depth, Tensor gt_flow,
                   const std::vector<double>& flow_valid);

/// Scene-flow regularizers evaluated on the exposure's quadrature samples for
/// both adjacent targets. Backward flows are re-queried at the warped points.
struct SceneFlowLoss {
  Tensor cyc;
  Tensor smooth;
  Tensor min;
  Tensor wreg;
};
SceneFlowLoss loss_scene_flow(RenderContext& ctx, const ExposureBundle& src,
                              const std::vector<const CrossTimeRender*>& neighbors);

struct LossTerms {
  Tensor rgb_dy, rgb_st, rgb_cb, cross, data_depth, data_flow, cyc, smooth, min, wreg;
  Tensor total;
};

/// Weighted composition; lambda_data decays with the step count.
Tensor total_loss(const LossTerms& t, const LossWeights& w, std::int64_t step);

struct LossReport {
  double rgb_dy = 0, rgb_st = 0, rgb_cb = 0, cross = 0;
  double data_depth = 0, data_flow = 0;
  double cyc = 0, smooth = 0, minflow = 0, wreg = 0;
  double lambda_data = 0;
  double total = 0;

  static std::string csv_header();
  std::string csv_row(std::int64_t step) const;
};

LossReport report_from_terms(const LossTerms& t, const LossWeights& w, std::int64_t step);

/// Least-squares scale/shift fitting gt ~ a*pred + b over valid pixels; used
/// only when ingesting priors with unknown metric scale.
void align_depth_scale_shift(const std::vector<double>& pred, std::vector<double>& gt,
                             const std::vector<double>& valid);

}  // namespace blurf
