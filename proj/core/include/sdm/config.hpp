#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "sdm/distill.hpp"

namespace sdm {

struct ScheduleConfig {
  std::string kind = "linear";
  int T = 50;
  double beta_min = 1e-4;
  double beta_max = 0.1;
};

struct TeacherConfig {
  int iters = 8000;
  int batch = 128;
  double lr = 2e-3;
  int log_every = 400;
};

struct EvalConfig {
  int episodes = 100;
  int nfe = 10;
  int samples = 4000;
  int bench_reps = 200;
  int bench_warmup = 20;
};

struct RunConfig {
  std::string task = "pointmass";
  std::string out_dir = "run";
  std::uint64_t seed = 42;
  std::vector<std::uint64_t> seeds = {42, 43, 44};
  int episodes = 20;
  ScheduleConfig schedule;
  std::vector<std::size_t> hidden = {128, 128, 128};
  TeacherConfig teacher;
  DistillConfig distill;
  EvalConfig eval;

  void validate() const; // throws ConfigError
};

// Defaults <- JSON file (optional) <- dotted-path overrides, in that order.
// Unknown keys and type mismatches are rejected naming the key.
RunConfig parse_config(const std::string& path,
                       const std::vector<std::pair<std::string, std::string>>& overrides);

std::string config_to_json(const RunConfig& cfg);
void save_config_snapshot(const RunConfig& cfg, const std::string& path);

}  // namespace sdm
