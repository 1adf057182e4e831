#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "losc/dynamics.hpp"
#include "losc/guidance.hpp"
#include "losc/scenario.hpp"
#include "losc/seeker.hpp"

namespace losc {

inline constexpr int kObsDim = 8;
inline constexpr int kActDim = 3;

/// [los_x los_y los_z rate_x rate_y rate_z closing_velocity range]
using Observation = Eigen::Matrix<double, kObsDim, 1>;

Observation make_observation(const SeekerOutput& s);

struct RewardTerms {
  double shaping = 0.0;
  double terminal = 0.0;

  double total() const { return shaping + terminal; }
};

/// Curvature penalty every step; at the final step the hit bonus (strictly
/// inside r_lim) and the Gaussian closeness bonus exp(-miss^2 / sigma^2).
RewardTerms reward(double range, double theta_norm, bool done, const RewardParams& p);

struct StepResult {
  Observation obs;
  RewardTerms reward;
  bool done = false;
};

struct EpisodeResult {
  double miss = 0.0;
  int steps = 0;
  std::vector<double> accel_samples;         // |a_M| per guidance step
  std::vector<double> target_accel_samples;  // |a_T| per guidance step
  Termination termination = Termination::kRunning;
  double total_reward = 0.0;
  ManeuverKind maneuver = ManeuverKind::kBangBang;
};

/// Episodic reset/step environment around one engagement. Each step applies
/// the action through the curved-LOS guidance pipeline and integrates one
/// guidance interval.
class EngagementEnv {
 public:
  explicit EngagementEnv(ScenarioConfig cfg);

  Observation reset(std::uint64_t seed);
  StepResult step(const Vec3& action);

  bool done() const { return done_; }
  int steps() const { return steps_; }
  const EngagementState& state() const { return state_; }
  const InitialConditions& initial_conditions() const { return ic_; }
  const ScenarioConfig& config() const { return cfg_; }
  const EpisodeResult& result() const { return result_; }
  const std::vector<TraceRow>& trace() const { return trace_; }
  const SeekerOutput& seeker_output() const { return seeker_out_; }

 private:
  SeekerOutput observe();

  ScenarioConfig cfg_;
  DynamicsParams dynamics_;
  Rng rng_;
  InitialConditions ic_;
  EngagementState state_;
  std::optional<Seeker> seeker_;
  FlightControl fcs_;
  SeekerOutput seeker_out_;
  EpisodeResult result_;
  std::vector<TraceRow> trace_;
  bool started_ = false;
  bool done_ = false;
  int steps_ = 0;
};

/// Action source for run_episode. PN and APN use ZeroAgent.
class Agent {
 public:
  virtual ~Agent() = default;
  virtual void begin_episode() = 0;
  virtual Vec3 act(const Observation& obs) = 0;
};

class ZeroAgent final : public Agent {
 public:
  void begin_episode() override {}
  Vec3 act(const Observation&) override { return Vec3::Zero(); }
};

/// Runs one full episode. When `trace` is given it receives one row per
/// guidance step.
EpisodeResult run_episode(const ScenarioConfig& cfg, Agent& agent, std::uint64_t seed,
                          std::vector<TraceRow>* trace = nullptr);

}  // namespace losc
