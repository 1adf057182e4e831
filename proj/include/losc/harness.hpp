#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "losc/env.hpp"
#include "losc/scenario.hpp"

namespace losc {

/// Aggregate of one Monte Carlo benchmark. Percentages are over episodes that
/// completed; failed episodes are counted separately.
struct BenchmarkStats {
  static constexpr double kThresholds[3] = {1.0, 2.0, 3.0};  // m

  std::string law;
  int episodes = 0;
  int completed = 0;
  int failures = 0;
  double miss_pct[3] = {0.0, 0.0, 0.0};  // % of misses below each threshold
  double miss_mean = 0.0;
  double miss_median = 0.0;
  double accel_mean = 0.0;
  double accel_std = 0.0;
  double accel_max = 0.0;
  double target_accel_mean = 0.0;
  double target_accel_std = 0.0;
  double target_accel_max = 0.0;
  std::vector<std::string> failure_messages;  // first few only
};

struct BenchmarkOptions {
  int episodes = 5000;
  std::uint64_t seed = 1;
  std::string checkpoint;  // required for PN-LOSC
};

/// Runs the episodes for cfg.guidance.law and aggregates them. Episode i uses
/// seed derive_seed(seed, seeds::kBench, i).
BenchmarkStats run_benchmark(const ScenarioConfig& cfg, const BenchmarkOptions& opts);

void write_report(std::ostream& os, const BenchmarkStats& s);
std::string summary_json(const BenchmarkStats& s);

/// Runs one episode and writes its trace (schema of write_trace) to `path`.
EpisodeResult export_trajectory(const ScenarioConfig& cfg, std::uint64_t seed,
                                const std::string& checkpoint, const std::string& path);

}  // namespace losc
