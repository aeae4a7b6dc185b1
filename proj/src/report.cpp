// Copyright (c) 2026 The blurf Authors.
// SPDX-License-Identifier: Apache-2.0
#include "blurf/report.hpp"

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "blurf/util.hpp"

namespace blurf {

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string git_describe_string() {
  std::array<char, 256> buf{};
  std::string out = "unknown";
  FILE* p = popen("git describe --always --dirty 2>/dev/null", "r");
  if (p) {
    if (fgets(buf.data(), int(buf.size()), p)) {
      out.assign(buf.data());
      while (!out.empty() && (out.back() == '\n' || out.back() == '\r')) out.pop_back();
      if (out.empty()) out = "unknown";
    }
    pclose(p);
  }
  return out;
}

void write_run_record(const std::string& out_dir, const RunRecord& rec) {
  std::filesystem::create_directories(out_dir);
  nlohmann::json j;
  j["command"] = rec.command;
  char hash_hex[32];
  std::snprintf(hash_hex, sizeof(hash_hex), "%016llx",
                static_cast<unsigned long long>(fnv1a(rec.config_json)));
  j["config_hash"] = std::string(hash_hex);
  j["seed"] = rec.seed;
  j["git_describe"] = git_describe_string();
  j["wall_time_s"] = rec.wall_time_s;
  j["threads"] = rec.threads;
  std::ofstream os(out_dir + "/run.json");
  os << j.dump(2) << "\n";
}

}  // namespace blurf
