// Copyright (c) 2026 The blurf Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "blurf/synthdata.hpp"
#include "blurf/training.hpp"

namespace blurf {

int cli_main(int argc, char** argv);

/// Renders a full view at fraction `alpha` of the frame's exposure using the
/// model's current pose estimates. Midpoint sampling keeps this a pure
/// function of checkpoint + dataset.
Image render_full_view(Model& model, const Dataset& ds, int frame, double alpha, RenderMode mode,
                       int samples_m, int chunk = 1024);

/// Depth/flow prior maps for one frame (EVC-composited over its timestamps).
struct PriorMaps {
  Image depth;
  std::optional<Image> flow;
};
PriorMaps render_prior_maps(Model& model, const Dataset& ds, int frame, int samples_m,
                            int chunk = 512);

struct EvalReport {
  std::vector<int> frame;
  std::vector<double> psnr_v, ssim_v;
  double mean_psnr = 0.0, mean_ssim = 0.0;
  std::string to_json() const;
  std::string to_csv() const;
};

/// Mid-exposure sharp renders against ground-truth sharp frames.
EvalReport evaluate_model(Model& model, const Dataset& ds, int samples_m, int chunk = 1024);
/// The blurry inputs themselves against ground-truth sharp frames.
EvalReport evaluate_baseline(const Dataset& ds);

}  // namespace blurf
