#include <cmath>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "losc/losc.h"

namespace {

losc_config* short_config(const char* law) {
  losc_config* cfg = nullptr;
  EXPECT_EQ(losc_config_new(&cfg), LOSC_OK);
  EXPECT_EQ(losc_config_set(cfg, "scenario.range_m=[2000, 3000]"), LOSC_OK);
  EXPECT_EQ(losc_config_set(cfg, (std::string("scenario.guidance.law=") + law).c_str()), LOSC_OK);
  return cfg;
}

}  // namespace

TEST(CApi, VersionAndStatusStrings) {
  EXPECT_STREQ(losc_version(), "0.1.0");
  EXPECT_STRNE(losc_status_string(LOSC_ERR_CONFIG), losc_status_string(LOSC_OK));
}

TEST(CApi, NullArgumentsAreRejected) {
  EXPECT_EQ(losc_config_new(nullptr), LOSC_ERR_INVALID_ARGUMENT);
  EXPECT_GT(std::strlen(losc_last_error()), 0u);
  losc_config_free(nullptr);
  losc_env_free(nullptr);
  losc_bench_free(nullptr);
}

TEST(CApi, ConfigErrorsAndDump) {
  losc_config* cfg = nullptr;
  EXPECT_EQ(losc_config_parse("bogus_key: 1\n", &cfg), LOSC_ERR_CONFIG);
  EXPECT_EQ(cfg, nullptr);
  EXPECT_EQ(losc_config_load("/nonexistent.yaml", &cfg), LOSC_ERR_IO);
  ASSERT_EQ(losc_config_parse("seed: 77\n", &cfg), LOSC_OK);
  uint64_t seed = 0;
  EXPECT_EQ(losc_config_seed(cfg, &seed), LOSC_OK);
  EXPECT_EQ(seed, 77u);
  EXPECT_EQ(losc_config_set(cfg, "scenario.range_m=[3, 1]"), LOSC_ERR_CONFIG);

  size_t needed = 0;
  char tiny[4];
  EXPECT_EQ(losc_config_dump(cfg, tiny, sizeof tiny, &needed), LOSC_ERR_BUFFER_TOO_SMALL);
  ASSERT_GT(needed, sizeof tiny);
  std::vector<char> buf(needed);
  ASSERT_EQ(losc_config_dump(cfg, buf.data(), buf.size(), &needed), LOSC_OK);
  losc_config* again = nullptr;
  ASSERT_EQ(losc_config_parse(buf.data(), &again), LOSC_OK);
  EXPECT_EQ(losc_config_seed(again, &seed), LOSC_OK);
  EXPECT_EQ(seed, 77u);
  losc_config_free(again);
  losc_config_free(cfg);
}

TEST(CApi, EnvEpisodeRunsToDone) {
  losc_config* cfg = short_config("pn-losc");
  losc_env* env = nullptr;
  ASSERT_EQ(losc_env_new(cfg, &env), LOSC_OK);
  double obs[LOSC_OBS_DIM];
  const double action[LOSC_ACT_DIM] = {0.0, 0.0, 0.0};
  double range0 = 0.0;
  ASSERT_EQ(losc_env_reset(env, 3, obs), LOSC_OK);
  ASSERT_EQ(losc_env_range(env, &range0), LOSC_OK);
  EXPECT_GE(range0, 2000.0);
  EXPECT_LE(range0, 3000.0);
  int done = 0, steps = 0;
  double reward = 0.0;
  while (!done) {
    ASSERT_EQ(losc_env_step(env, action, obs, &reward, &done), LOSC_OK);
    ASSERT_TRUE(std::isfinite(reward));
    ASSERT_LT(++steps, 100000);
  }
  EXPECT_EQ(losc_env_step(env, action, obs, &reward, &done), LOSC_ERR_STEP_AFTER_DONE);
  losc_env_free(env);
  losc_config_free(cfg);
}

TEST(CApi, BenchmarkAndReports) {
  losc_config* cfg = short_config("pn");
  ASSERT_EQ(losc_config_set(cfg, "episodes=6"), LOSC_OK);
  losc_bench* bench = nullptr;
  ASSERT_EQ(losc_bench_run(cfg, &bench), LOSC_OK);
  losc_bench_stats s{};
  ASSERT_EQ(losc_bench_stats_get(bench, &s), LOSC_OK);
  EXPECT_EQ(s.episodes, 6);
  EXPECT_EQ(s.completed + s.failures, 6);
  EXPECT_LE(s.miss_pct_100cm, s.miss_pct_300cm);
  EXPECT_NE(std::string(losc_bench_report(bench)).find("<100cm"), std::string::npos);
  EXPECT_EQ(std::string(losc_bench_json(bench)).front(), '{');
  losc_bench_free(bench);

  ASSERT_EQ(losc_config_set(cfg, "scenario.guidance.law=pn-losc"), LOSC_OK);
  EXPECT_EQ(losc_bench_run(cfg, &bench), LOSC_ERR_MISSING_CHECKPOINT);
  losc_config_free(cfg);
}

TEST(CApi, TrainThenTraceWithCheckpoint) {
  const auto dir = std::filesystem::temp_directory_path() / "losc_capi_train";
  std::filesystem::remove_all(dir);
  losc_config* cfg = short_config("pn-losc");
  ASSERT_EQ(losc_config_set(cfg, "trainer.episodes_per_rollout=2"), LOSC_OK);
  ASSERT_EQ(losc_config_set(cfg, "trainer.total_episodes=4"), LOSC_OK);
  int rows = 0;
  auto cb = [](const losc_history_row* row, void* user) {
    EXPECT_EQ(row->update, *static_cast<int*>(user));
    ++*static_cast<int*>(user);
  };
  ASSERT_EQ(losc_train(cfg, dir.c_str(), nullptr, cb, &rows), LOSC_OK) << losc_last_error();
  EXPECT_EQ(rows, 2);
  const std::string ckpt = (dir / "checkpoint.json").string();
  ASSERT_TRUE(std::filesystem::exists(ckpt));

  ASSERT_EQ(losc_config_set(cfg, ("checkpoint=\"" + ckpt + "\"").c_str()), LOSC_OK);
  double miss = -1.0;
  const std::string trace = (dir / "trace.txt").string();
  ASSERT_EQ(losc_trace_export(cfg, 9, trace.c_str(), &miss), LOSC_OK) << losc_last_error();
  EXPECT_GE(miss, 0.0);
  EXPECT_TRUE(std::filesystem::exists(trace));
  losc_config_free(cfg);
}

TEST(CApi, SelfCheckPasses) {
  int failures = -1, seen = 0;
  auto cb = [](const char*, int passed, const char*, void* user) {
    EXPECT_TRUE(passed);
    ++*static_cast<int*>(user);
  };
  ASSERT_EQ(losc_check(cb, &seen, &failures), LOSC_OK);
  EXPECT_EQ(failures, 0);
  EXPECT_GT(seen, 10);
}
