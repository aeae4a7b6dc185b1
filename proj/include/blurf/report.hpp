// Copyright (c) 2026 The blurf Authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>

namespace blurf {

/// Provenance record written by every CLI run as run.json.
struct RunRecord {
  std::string command;
  std::string config_json;  // hashed into config_hash
  std::uint64_t seed = 0;
  double wall_time_s = 0.0;
  int threads = 1;
};

std::string git_describe_string();
void write_run_record(const std::string& out_dir, const RunRecord& rec);

}  // namespace blurf
