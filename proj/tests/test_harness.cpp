#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "losc/harness.hpp"
#include "losc/ppo.hpp"
#include "losc/seeds.hpp"

using namespace losc;

namespace {

ScenarioConfig law_config(GuidanceLaw law) {
  ScenarioConfig c;
  c.range_m = {2000.0, 3000.0};
  c.guidance.law = law;
  return c;
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("losc_harness_" + name)).string();
}

}  // namespace

TEST(Benchmark, ZeroEpisodesIsInvalid) {
  try {
    run_benchmark(law_config(GuidanceLaw::kPn), {0, 1, ""});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidArgument);
  }
}

TEST(Benchmark, PnLoscNeedsCheckpoint) {
  try {
    run_benchmark(law_config(GuidanceLaw::kPnLosc), {4, 1, ""});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMissingCheckpoint);
  }
}

TEST(Benchmark, DeterministicAndConsistent) {
  const BenchmarkStats a = run_benchmark(law_config(GuidanceLaw::kApn), {40, 3, ""});
  const BenchmarkStats b = run_benchmark(law_config(GuidanceLaw::kApn), {40, 3, ""});
  EXPECT_EQ(a.law, "apn");
  EXPECT_EQ(a.completed + a.failures, 40);
  EXPECT_EQ(a.miss_mean, b.miss_mean);
  EXPECT_EQ(a.accel_mean, b.accel_mean);
  EXPECT_EQ(a.accel_max, b.accel_max);
  EXPECT_LE(a.miss_pct[0], a.miss_pct[1]);
  EXPECT_LE(a.miss_pct[1], a.miss_pct[2]);
  EXPECT_LE(a.accel_max, 40.0 * kGravity * (1.0 + 1e-12));
  EXPECT_GE(a.accel_std, 0.0);
}

TEST(Benchmark, EpisodesMatchDirectRuns) {
  const ScenarioConfig cfg = law_config(GuidanceLaw::kPn);
  const BenchmarkStats s = run_benchmark(cfg, {5, 11, ""});
  double sum = 0.0;
  for (int i = 0; i < 5; ++i) {
    ZeroAgent agent;
    sum += run_episode(cfg, agent, derive_seed(11, seeds::kBench, i)).miss;
  }
  EXPECT_NEAR(s.miss_mean, sum / 5.0, 1e-12);
}

TEST(Benchmark, ReportAndJson) {
  const BenchmarkStats s = run_benchmark(law_config(GuidanceLaw::kPn), {6, 1, ""});
  std::ostringstream os;
  write_report(os, s);
  EXPECT_NE(os.str().find("<200cm"), std::string::npos);
  EXPECT_NE(os.str().find("pn"), std::string::npos);
  const std::string j = summary_json(s);
  EXPECT_NE(j.find("\"miss_pct_lt_300cm\""), std::string::npos);
}

TEST(Benchmark, PnLoscWithZeroCurvatureScaleEqualsPn) {
  Checkpoint ckpt;
  Rng rng(4);
  ckpt.params = init_params(NetSpec::policy(8, 3), NetSpec::value(8), rng);
  const std::string path = temp_path("ckpt.json");
  save_checkpoint(ckpt, path);
  ScenarioConfig losc = law_config(GuidanceLaw::kPnLosc);
  losc.guidance.curvature_scale = 0.0;
  const BenchmarkStats a = run_benchmark(losc, {8, 2, path});
  const BenchmarkStats b = run_benchmark(law_config(GuidanceLaw::kPn), {8, 2, ""});
  EXPECT_EQ(a.miss_mean, b.miss_mean);
  EXPECT_EQ(a.accel_mean, b.accel_mean);
}

TEST(Trace, PnTraceHasZeroCurvatureAngles) {
  const std::string path = temp_path("trace.txt");
  const EpisodeResult r = export_trajectory(law_config(GuidanceLaw::kPn), 5, "", path);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header.rfind("# t ", 0), 0u);
  int rows = 0;
  for (std::string line; std::getline(in, line); ++rows) {
    std::istringstream ls(line);
    std::vector<double> cols;
    for (double x; ls >> x;) cols.push_back(x);
    ASSERT_EQ(cols.size(), 19u);
    EXPECT_EQ(cols[15], 0.0);
    EXPECT_EQ(cols[16], 0.0);
    EXPECT_EQ(cols[17], 0.0);
    EXPECT_GE(cols[18], 0.0);  // curved-LOS rate equals the plain LOS rate here
  }
  EXPECT_EQ(rows, r.steps);
}
