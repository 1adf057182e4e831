/* C interface to the engagement lab. Every function returns a losc_status;
 * on failure losc_last_error() describes the problem for the calling thread.
 * Handles are opaque and owned by the caller until the matching _free. */
#ifndef LOSC_H
#define LOSC_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(__GNUC__)
#define LOSC_API __attribute__((visibility("default")))
#else
#define LOSC_API
#endif

typedef enum losc_status {
  LOSC_OK = 0,
  LOSC_ERR_INVALID_ARGUMENT = 1,
  LOSC_ERR_INFEASIBLE_LEAD = 2,
  LOSC_ERR_STEP_AFTER_DONE = 3,
  LOSC_ERR_SHAPE_MISMATCH = 4,
  LOSC_ERR_MISSING_CACHE = 5,
  LOSC_ERR_NON_FINITE = 6,
  LOSC_ERR_CONFIG = 7,
  LOSC_ERR_IO = 8,
  LOSC_ERR_MISSING_CHECKPOINT = 9,
  LOSC_ERR_BUFFER_TOO_SMALL = 10,
  LOSC_ERR_INTERNAL = 99
} losc_status;

#define LOSC_OBS_DIM 8
#define LOSC_ACT_DIM 3

typedef struct losc_config losc_config;
typedef struct losc_env losc_env;
typedef struct losc_bench losc_bench;

LOSC_API const char* losc_version(void);
LOSC_API const char* losc_status_string(losc_status status);
/* Message of the last failed call on this thread; "" if none. */
LOSC_API const char* losc_last_error(void);

/* ---- configuration ---------------------------------------------------- */

LOSC_API losc_status losc_config_new(losc_config** out);
LOSC_API losc_status losc_config_load(const char* path, losc_config** out);
LOSC_API losc_status losc_config_parse(const char* yaml_text, losc_config** out);
LOSC_API void losc_config_free(losc_config* cfg);
/* "dotted.key=value"; the value is YAML (e.g. "scenario.range_m=[5000, 8000]"). */
LOSC_API losc_status losc_config_set(losc_config* cfg, const char* assignment);
/* Writes the full YAML dump. When cap is too small, returns
 * LOSC_ERR_BUFFER_TOO_SMALL and stores the required size (with NUL) in *needed. */
LOSC_API losc_status losc_config_dump(const losc_config* cfg, char* buf, size_t cap,
                                      size_t* needed);
LOSC_API losc_status losc_config_seed(const losc_config* cfg, uint64_t* seed);

/* ---- environment ------------------------------------------------------- */

LOSC_API losc_status losc_env_new(const losc_config* cfg, losc_env** out);
LOSC_API void losc_env_free(losc_env* env);
LOSC_API losc_status losc_env_reset(losc_env* env, uint64_t seed, double obs[LOSC_OBS_DIM]);
LOSC_API losc_status losc_env_step(losc_env* env, const double action[LOSC_ACT_DIM],
                                   double obs[LOSC_OBS_DIM], double* reward, int* done);
/* Current range (the miss distance once done). */
LOSC_API losc_status losc_env_range(const losc_env* env, double* range);

/* ---- benchmark --------------------------------------------------------- */

typedef struct losc_bench_stats {
  int episodes;
  int completed;
  int failures;
  double miss_pct_100cm;
  double miss_pct_200cm;
  double miss_pct_300cm;
  double miss_mean;
  double miss_median;
  double accel_mean;
  double accel_std;
  double accel_max;
  double target_accel_mean;
  double target_accel_std;
  double target_accel_max;
} losc_bench_stats;

/* Runs cfg.episodes episodes of cfg's guidance law from cfg.seed. */
LOSC_API losc_status losc_bench_run(const losc_config* cfg, losc_bench** out);
LOSC_API void losc_bench_free(losc_bench* bench);
LOSC_API losc_status losc_bench_stats_get(const losc_bench* bench, losc_bench_stats* out);
/* Text table and JSON summary; valid until losc_bench_free. */
LOSC_API const char* losc_bench_report(const losc_bench* bench);
LOSC_API const char* losc_bench_json(const losc_bench* bench);

/* ---- trajectories, training, checks ------------------------------------ */

/* One episode from `seed`, written as a columnar trace to `path`. */
LOSC_API losc_status losc_trace_export(const losc_config* cfg, uint64_t seed, const char* path,
                                       double* miss);

typedef struct losc_history_row {
  int update;
  long long episodes;
  double reward_mean;
  double reward_std;
  double reward_min;
  double steps_mean;
  int steps_max;
  double kl;
  double clip;
  double lr_policy;
  double hit_rate;
} losc_history_row;

typedef void (*losc_train_callback)(const losc_history_row* row, void* user);

/* Trains from cfg.seed; writes checkpoint.json and history.txt into out_dir.
 * resume_from may be NULL. */
LOSC_API losc_status losc_train(const losc_config* cfg, const char* out_dir,
                                const char* resume_from, losc_train_callback callback,
                                void* user);

typedef void (*losc_check_callback)(const char* name, int passed, const char* detail,
                                    void* user);

/* Runs the self-check suite; *failures receives the failure count (0 or 1,
 * the suite stops at the first failure). */
LOSC_API losc_status losc_check(losc_check_callback callback, void* user, int* failures);

#ifdef __cplusplus
}
#endif

#endif
