#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "losc/env.hpp"
#include "losc/nets.hpp"
#include "losc/scenario.hpp"

namespace losc {

/// Running per-component mean/variance (Welford) used to scale observations.
class ObsScaler {
 public:
  static constexpr double kVarFloor = 1e-8;

  explicit ObsScaler(int dim = kObsDim, double clip = 10.0);

  void update(const VecX& raw);
  VecX normalize(const VecX& raw) const;

  int dim() const { return static_cast<int>(mean_.size()); }
  double count() const { return count_; }
  double clip() const { return clip_; }
  const VecX& mean() const { return mean_; }
  VecX variance() const;

  // Raw state access for checkpoints.
  const VecX& m2() const { return m2_; }
  static ObsScaler restore(double clip, double count, VecX mean, VecX m2);

 private:
  double clip_;
  double count_ = 0.0;
  VecX mean_;
  VecX m2_;
};

/// Adaptive-moment optimizer over one flat parameter vector.
struct Adam {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  long long t = 0;
  VecX m;
  VecX v;

  /// Descent step; pass a negated gradient for ascent.
  void step(VecX& params, const VecX& grad, double lr);
};

struct KlServoConfig {
  double lr_decrease = 1.5;
  double clip_decrease = 1.2;
  double increase = 1.1;
  double clip_min = 0.05;
  double clip_max = 0.3;
  double lr_min = 1e-6;
  double lr_max = 1e-2;

  friend bool operator==(const KlServoConfig&, const KlServoConfig&) = default;
};

struct TrainerConfig {
  double clip_init = 0.2;
  double kl_target = 1e-3;
  double lr_value = 1e-3;
  double lr_policy = 5e-5;
  int epochs = 3;
  int episodes_per_rollout = 60;
  long long total_episodes = 90000;
  double early_stop_factor = 4.0;   // stop epochs once KL > factor * target
  double entropy_coef = 0.0;
  double obs_clip = 10.0;
  int checkpoint_every = 50;        // updates; 0 disables periodic checkpoints
  KlServoConfig servo;

  int updates() const { return static_cast<int>(total_episodes / episodes_per_rollout); }

  friend bool operator==(const TrainerConfig&, const TrainerConfig&) = default;
};

struct Transition {
  Observation raw_obs;
  VecX obs;              // scaled
  VecX action;           // unclamped Gaussian sample
  double log_prob = 0.0;
  double value = 0.0;
  RewardTerms reward;
  bool done = false;
  VecX policy_hidden;    // at entry
  VecX value_hidden;     // at entry
  VecX mean_old;
  VecX log_std_old;
  double ret = 0.0;
  double advantage = 0.0;
};

struct EpisodeRollout {
  std::vector<Transition> steps;
  EpisodeResult result;
};

struct RolloutSet {
  std::vector<EpisodeRollout> episodes;

  std::size_t transitions() const;
};

/// Stochastic (or deterministic, when `deterministic`) policy acting in one
/// environment; records one Transition per guidance step.
EpisodeRollout run_policy_episode(const ScenarioConfig& cfg, const PolicyParams& params,
                                  const ObsScaler& scaler, std::uint64_t env_seed,
                                  std::uint64_t action_seed, bool deterministic = false);

/// Runs `n_episodes` episodes against a frozen snapshot. Episode i uses seeds
/// derived from (master_seed, first_episode + i). Raw observations are then
/// folded into `scaler` in episode order.
RolloutSet collect_rollouts(const ScenarioConfig& cfg, const PolicyParams& params,
                            ObsScaler& scaler, int n_episodes, std::uint64_t master_seed,
                            long long first_episode, bool deterministic = false);

/// G_k = sum_l g1^(l-k) shaping_l + g2^(T-k) terminal_T, A_k = G_k - V_k,
/// then z-scores the advantages over the whole set when `normalize` is set.
void compute_returns_advantages(RolloutSet& rollouts, double gamma_shaping,
                                double gamma_terminal, bool normalize = true);

/// Clipped surrogate min(p A, clip(p, 1-eps, 1+eps) A) for one sample.
double clipped_surrogate(double ratio, double advantage, double clip);

struct SurrogateEval {
  double objective = 0.0;     // mean clipped surrogate (+ entropy bonus)
  double mean_ratio = 0.0;
  double clip_fraction = 0.0;
  double kl = 0.0;            // mean KL(old || current)
  double entropy = 0.0;
};

/// Policy objective and, when `grad` is non-null, its exact gradient with
/// respect to `params.policy` (network weights and log-std).
SurrogateEval policy_objective(const RolloutSet& rollouts, const PolicyParams& params,
                               double clip, double entropy_coef, VecX* grad);

/// Value regression L = 1/(2M) sum (V - G)^2 and its gradient.
double value_loss(const RolloutSet& rollouts, const PolicyParams& params, VecX* grad);

struct OptimizerState {
  Adam policy;
  Adam value;
  double clip = 0.2;
  double lr_policy = 5e-5;
};

struct UpdateDiagnostics {
  double kl = 0.0;
  double clip_fraction = 0.0;
  double policy_objective = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  int epochs_run = 0;
};

/// Epochs of full-batch clipped-surrogate ascent and value regression.
UpdateDiagnostics ppo_update(const RolloutSet& rollouts, PolicyParams& params,
                             OptimizerState& opt, const TrainerConfig& cfg);

/// Adjusts the clip parameter and policy learning rate toward the KL target.
void kl_servo(double measured_kl, double kl_target, const KlServoConfig& servo,
              OptimizerState& opt);

struct HistoryRow {
  int update = 0;
  long long episodes = 0;
  double reward_mean = 0.0;
  double reward_std = 0.0;
  double reward_min = 0.0;
  double steps_mean = 0.0;
  int steps_max = 0;
  double kl = 0.0;
  double clip = 0.0;
  double lr_policy = 0.0;
  double hit_rate = 0.0;   // fraction of episodes with miss < r_lim
};

void write_history(std::ostream& os, const std::vector<HistoryRow>& rows);

struct Checkpoint {
  static constexpr int kFormatVersion = 1;

  PolicyParams params;
  ObsScaler scaler;
  // Training progress; absent (update = 0, empty moments) for fresh params.
  int update = 0;
  long long episodes = 0;
  OptimizerState optimizer;
};

void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

struct TrainOptions {
  std::string out_dir;                 // checkpoint + history; empty = in memory only
  std::string resume_from;             // optional checkpoint path
  std::function<void(const HistoryRow&)> on_update;
};

struct TrainResult {
  Checkpoint checkpoint;
  std::vector<HistoryRow> history;
};

/// Collect -> returns/advantages -> update -> servo, for cfg.updates() rounds.
TrainResult train(const ScenarioConfig& scenario, const TrainerConfig& cfg, std::uint64_t seed,
                  const TrainOptions& options = {});

/// Deterministic policy (Gaussian mean) for benchmarking and traces.
class PolicyAgent final : public Agent {
 public:
  PolicyAgent(PolicyParams params, ObsScaler scaler);

  void begin_episode() override;
  Vec3 act(const Observation& obs) override;

 private:
  PolicyParams params_;
  ObsScaler scaler_;
  VecX hidden_;
};

}  // namespace losc
