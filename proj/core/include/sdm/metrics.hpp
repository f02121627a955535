#pragma once

#include "sdm/denoiser.hpp"
#include "sdm/generator.hpp"
#include "sdm/pointmass.hpp"
#include "sdm/rng.hpp"
#include "sdm/schedule.hpp"
#include "sdm/tensor.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace sdm {

struct MetricEntry {
  std::string name;
  double value = 0.0;
  std::uint64_t seed = 0;
  std::string context;
};

struct MetricsReport {
  std::vector<MetricEntry> entries;
  std::string timestamp;

  void add(const std::string& name, double value, std::uint64_t seed,
           const std::string& context = "");
};

bool is_known_metric(const std::string& name);
std::string now_timestamp_utc();

// CSV rows are `metric,value,seed,context`; the JSON mirror also carries the
// timestamp so the CSV stays byte-stable across reruns.
void report_save_csv(const MetricsReport& report, const std::string& path);
void report_save_json(const MetricsReport& report, const std::string& path);

struct Mmd2Result {
  double value = 0.0;
  double bandwidth = 0.0;
  bool fallback_bandwidth = false;
};

Mmd2Result mmd2_median(const Tensor2& x, const Tensor2& y);
double mmd2_fixed(const Tensor2& x, const Tensor2& y, double bandwidth);

struct CoverageMode {
  std::vector<double> center;
  double radius = 0.0;
};

std::vector<double> mode_coverage(const Tensor2& samples,
                                  const std::vector<CoverageMode>& modes);

double action_error(const OneStepGenerator& gen, const DenoiserNet& teacher,
                    const NoiseSchedule& s, const Tensor2& obs, Rng& rng,
                    int n_ref_nfe = 10);

double bench_latency(const std::function<void()>& call, int reps, int warmup);

struct SuccessRateResult {
  double mean = 0.0;
  double stddev = 0.0;
  std::vector<double> per_seed;
  std::vector<std::vector<int>> episode_success;
};

int thread_budget();

SuccessRateResult success_rate(const PointMassEnv& env,
                               const PolicyFactory& make_policy,
                               int n_episodes,
                               const std::vector<std::uint64_t>& seeds);

}  // namespace sdm
