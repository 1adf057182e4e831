#include "losc/losc.h"

#include <cstring>
#include <exception>
#include <memory>
#include <sstream>
#include <string>

#include "losc/config.hpp"
#include "losc/env.hpp"
#include "losc/harness.hpp"
#include "losc/ppo.hpp"
#include "losc/selfcheck.hpp"
#include "losc/version.hpp"

struct losc_config {
  losc::Config cfg;
};

struct losc_env {
  explicit losc_env(const losc::ScenarioConfig& s) : env(s) {}
  losc::EngagementEnv env;
};

struct losc_bench {
  losc::BenchmarkStats stats;
  std::string report;
  std::string json;
};

namespace {

thread_local std::string g_last_error;

losc_status fail(losc_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

losc_status from_code(losc::ErrorCode code) {
  switch (code) {
    case losc::ErrorCode::kInvalidArgument: return LOSC_ERR_INVALID_ARGUMENT;
    case losc::ErrorCode::kInfeasibleLead: return LOSC_ERR_INFEASIBLE_LEAD;
    case losc::ErrorCode::kStepAfterDone: return LOSC_ERR_STEP_AFTER_DONE;
    case losc::ErrorCode::kShapeMismatch: return LOSC_ERR_SHAPE_MISMATCH;
    case losc::ErrorCode::kMissingCache: return LOSC_ERR_MISSING_CACHE;
    case losc::ErrorCode::kNonFinite: return LOSC_ERR_NON_FINITE;
    case losc::ErrorCode::kConfig: return LOSC_ERR_CONFIG;
    case losc::ErrorCode::kIo: return LOSC_ERR_IO;
    case losc::ErrorCode::kMissingCheckpoint: return LOSC_ERR_MISSING_CHECKPOINT;
  }
  return LOSC_ERR_INTERNAL;
}

// Runs fn, translating exceptions into status codes.
template <typename Fn>
losc_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return LOSC_OK;
  } catch (const losc::Error& e) {
    return fail(from_code(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(LOSC_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(LOSC_ERR_INTERNAL, e.what());
  }
}

#define LOSC_REQUIRE(cond, what)                                  \
  do {                                                            \
    if (!(cond)) return fail(LOSC_ERR_INVALID_ARGUMENT, what);    \
  } while (0)

void copy_obs(const losc::Observation& o, double* out) {
  for (int i = 0; i < LOSC_OBS_DIM; ++i) out[i] = o[i];
}

}  // namespace

extern "C" {

const char* losc_version(void) { return losc::kVersion; }

const char* losc_status_string(losc_status status) {
  switch (status) {
    case LOSC_OK: return "ok";
    case LOSC_ERR_INVALID_ARGUMENT: return "invalid argument";
    case LOSC_ERR_INFEASIBLE_LEAD: return "infeasible lead angle";
    case LOSC_ERR_STEP_AFTER_DONE: return "step after episode end";
    case LOSC_ERR_SHAPE_MISMATCH: return "shape mismatch";
    case LOSC_ERR_MISSING_CACHE: return "missing forward cache";
    case LOSC_ERR_NON_FINITE: return "non-finite value";
    case LOSC_ERR_CONFIG: return "configuration error";
    case LOSC_ERR_IO: return "i/o error";
    case LOSC_ERR_MISSING_CHECKPOINT: return "missing checkpoint";
    case LOSC_ERR_BUFFER_TOO_SMALL: return "buffer too small";
    case LOSC_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* losc_last_error(void) { return g_last_error.c_str(); }

losc_status losc_config_new(losc_config** out) {
  LOSC_REQUIRE(out, "out is null");
  return guarded([&] { *out = new losc_config{}; });
}

losc_status losc_config_load(const char* path, losc_config** out) {
  LOSC_REQUIRE(path && out, "null argument");
  return guarded([&] { *out = new losc_config{losc::load_config(path)}; });
}

losc_status losc_config_parse(const char* yaml_text, losc_config** out) {
  LOSC_REQUIRE(yaml_text && out, "null argument");
  return guarded([&] { *out = new losc_config{losc::parse_config(yaml_text)}; });
}

void losc_config_free(losc_config* cfg) { delete cfg; }

losc_status losc_config_set(losc_config* cfg, const char* assignment) {
  LOSC_REQUIRE(cfg && assignment, "null argument");
  return guarded([&] {
    losc::Config updated = cfg->cfg;
    losc::apply_overrides(updated, {assignment});
    cfg->cfg = std::move(updated);
  });
}

losc_status losc_config_dump(const losc_config* cfg, char* buf, size_t cap, size_t* needed) {
  LOSC_REQUIRE(cfg, "cfg is null");
  std::string text;
  const losc_status st = guarded([&] { text = losc::dump_config(cfg->cfg); });
  if (st != LOSC_OK) return st;
  if (needed) *needed = text.size() + 1;
  if (!buf || cap < text.size() + 1) {
    return fail(LOSC_ERR_BUFFER_TOO_SMALL, "buffer too small for config dump");
  }
  std::memcpy(buf, text.c_str(), text.size() + 1);
  return LOSC_OK;
}

losc_status losc_config_seed(const losc_config* cfg, uint64_t* seed) {
  LOSC_REQUIRE(cfg && seed, "null argument");
  *seed = cfg->cfg.seed;
  return LOSC_OK;
}

losc_status losc_env_new(const losc_config* cfg, losc_env** out) {
  LOSC_REQUIRE(cfg && out, "null argument");
  return guarded([&] { *out = new losc_env(cfg->cfg.scenario); });
}

void losc_env_free(losc_env* env) { delete env; }

losc_status losc_env_reset(losc_env* env, uint64_t seed, double obs[LOSC_OBS_DIM]) {
  LOSC_REQUIRE(env && obs, "null argument");
  return guarded([&] { copy_obs(env->env.reset(seed), obs); });
}

losc_status losc_env_step(losc_env* env, const double action[LOSC_ACT_DIM],
                          double obs[LOSC_OBS_DIM], double* reward, int* done) {
  LOSC_REQUIRE(env && action && obs, "null argument");
  return guarded([&] {
    const losc::StepResult r = env->env.step(losc::Vec3(action[0], action[1], action[2]));
    copy_obs(r.obs, obs);
    if (reward) *reward = r.reward.total();
    if (done) *done = r.done ? 1 : 0;
  });
}

losc_status losc_env_range(const losc_env* env, double* range) {
  LOSC_REQUIRE(env && range, "null argument");
  *range = env->env.state().range();
  return LOSC_OK;
}

losc_status losc_bench_run(const losc_config* cfg, losc_bench** out) {
  LOSC_REQUIRE(cfg && out, "null argument");
  return guarded([&] {
    auto bench = std::make_unique<losc_bench>();
    bench->stats = losc::run_benchmark(
        cfg->cfg.scenario, {cfg->cfg.episodes, cfg->cfg.seed, cfg->cfg.checkpoint});
    std::ostringstream os;
    losc::write_report(os, bench->stats);
    bench->report = os.str();
    bench->json = losc::summary_json(bench->stats);
    *out = bench.release();
  });
}

void losc_bench_free(losc_bench* bench) { delete bench; }

losc_status losc_bench_stats_get(const losc_bench* bench, losc_bench_stats* out) {
  LOSC_REQUIRE(bench && out, "null argument");
  const losc::BenchmarkStats& s = bench->stats;
  *out = losc_bench_stats{s.episodes,         s.completed,         s.failures,
                          s.miss_pct[0],      s.miss_pct[1],       s.miss_pct[2],
                          s.miss_mean,        s.miss_median,       s.accel_mean,
                          s.accel_std,        s.accel_max,         s.target_accel_mean,
                          s.target_accel_std, s.target_accel_max};
  return LOSC_OK;
}

const char* losc_bench_report(const losc_bench* bench) {
  return bench ? bench->report.c_str() : "";
}

const char* losc_bench_json(const losc_bench* bench) { return bench ? bench->json.c_str() : ""; }

losc_status losc_trace_export(const losc_config* cfg, uint64_t seed, const char* path,
                              double* miss) {
  LOSC_REQUIRE(cfg && path, "null argument");
  return guarded([&] {
    const losc::EpisodeResult r =
        losc::export_trajectory(cfg->cfg.scenario, seed, cfg->cfg.checkpoint, path);
    if (miss) *miss = r.miss;
  });
}

losc_status losc_train(const losc_config* cfg, const char* out_dir, const char* resume_from,
                       losc_train_callback callback, void* user) {
  LOSC_REQUIRE(cfg && out_dir, "null argument");
  return guarded([&] {
    losc::TrainOptions opts;
    opts.out_dir = out_dir;
    if (resume_from) opts.resume_from = resume_from;
    if (callback) {
      opts.on_update = [&](const losc::HistoryRow& r) {
        const losc_history_row row{r.update,     r.episodes,  r.reward_mean, r.reward_std,
                                   r.reward_min, r.steps_mean, r.steps_max,  r.kl,
                                   r.clip,       r.lr_policy, r.hit_rate};
        callback(&row, user);
      };
    }
    losc::train(cfg->cfg.scenario, cfg->cfg.trainer, cfg->cfg.seed, opts);
  });
}

losc_status losc_check(losc_check_callback callback, void* user, int* failures) {
  return guarded([&] {
    int failed = 0;
    losc::run_selfcheck([&](const losc::CheckResult& r) {
      if (!r.passed) ++failed;
      if (callback) callback(r.name.c_str(), r.passed ? 1 : 0, r.detail.c_str(), user);
    });
    if (failures) *failures = failed;
  });
}

}  // extern "C"
