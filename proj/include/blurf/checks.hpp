// Copyright (c) 2026 The blurf Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "blurf/synthdata.hpp"
#include "blurf/training.hpp"

namespace blurf {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

// Fast property checks (also wired into the `check` CLI subcommand).
CheckResult check_gradient_fidelity();
CheckResult check_volume_oracle();
CheckResult check_se3_suite();
CheckResult check_dct_suite();
CheckResult check_evc_example();
CheckResult check_cross_degeneracy();
CheckResult check_blur_oracle();

std::vector<CheckResult> run_fast_checks();

// Training-scale checks; write artifacts under work_dir.
CheckResult check_end_to_end(const std::string& work_dir);
CheckResult check_ablation_directions(const std::string& work_dir);
CheckResult check_determinism(const std::string& work_dir);

/// Toy problem shared by the gradient check: 2 frames, 4 pixels, 8 samples.
Dataset gradient_toy_dataset();
TrainConfig gradient_toy_config();

/// Configuration used by the end-to-end criteria; sized for a small CPU.
TrainConfig acceptance_train_config(int frames);

}  // namespace blurf
