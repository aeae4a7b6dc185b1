// Copyright (c) 2026 The blurf Authors.
// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite: runs every criterion and prints one pass/fail line each.
// Usage: acceptance [work_dir] [--fast]

#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include "blurf/checks.hpp"
#include "blurf/kernels.hpp"

int main(int argc, char** argv) {
  blurf::kernels::configure_threads();
  std::string work_dir = "acceptance_work";
  bool fast_only = false;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--fast") == 0) {
      fast_only = true;
    } else {
      work_dir = argv[i];
    }
  }

  std::vector<blurf::CheckResult> results = blurf::run_fast_checks();
  if (!fast_only) {
    results.push_back(blurf::check_end_to_end(work_dir));
    results.push_back(blurf::check_ablation_directions(work_dir));
    results.push_back(blurf::check_determinism(work_dir));
  }

  bool all = true;
  for (const auto& r : results) {
    std::printf("%s %s (%s) [%.1f s]\n", r.pass ? "[PASS]" : "[FAIL]", r.name.c_str(),
                r.detail.c_str(), r.seconds);
    all = all && r.pass;
  }
  std::printf("%s\n", all ? "acceptance: all criteria passed" : "acceptance: FAILURES present");
  return all ? 0 : 1;
}
