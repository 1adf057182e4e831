#include "losc/env.hpp"

#include <cmath>
#include <utility>

namespace losc {

Observation make_observation(const SeekerOutput& s) {
  Observation o;
  o << s.los, s.los_rate, s.closing_velocity, s.range;
  return o;
}

RewardTerms reward(double range, double theta_norm, bool done, const RewardParams& p) {
  RewardTerms r;
  r.shaping = p.alpha * theta_norm;
  if (done) {
    if (range < p.r_lim) r.terminal += p.beta;
    r.terminal += p.epsilon * std::exp(-(range * range) / (p.sigma * p.sigma));
  }
  return r;
}

EngagementEnv::EngagementEnv(ScenarioConfig cfg) : cfg_(std::move(cfg)), fcs_(cfg_.guidance) {
  cfg_.validate();
  dynamics_.missile = cfg_.missile;
}

SeekerOutput EngagementEnv::observe() {
  const Vec3 r_tm = state_.rel_pos();
  const Vec3 los = r_tm.normalized();
  const Vec3 apparent =
      seeker_->apparent_los(los, state_.missile_dir(), cfg_.integration.guidance_dt, rng_);
  return nav_outputs(apparent, r_tm, state_.rel_vel());
}

Observation EngagementEnv::reset(std::uint64_t seed) {
  rng_.seed(seed);
  ic_ = sample_initial_conditions(cfg_, rng_);
  dynamics_.target = ic_.target_drag;
  state_ = ic_.state();
  seeker_.emplace(ic_.radome, cfg_.sigma_los, cfg_.seeker_lag_tau);
  fcs_.reset();
  result_ = EpisodeResult{};
  result_.maneuver = ic_.maneuver.kind;
  trace_.clear();
  steps_ = 0;
  started_ = true;
  done_ = false;
  seeker_out_ = observe();
  return make_observation(seeker_out_);
}

StepResult EngagementEnv::step(const Vec3& action) {
  if (!started_) throw Error(ErrorCode::kStepAfterDone, "step() called before reset()");
  if (done_) throw Error(ErrorCode::kStepAfterDone, "step() called after the episode ended");

  const Vec3 u = action.cwiseMax(-1.0).cwiseMin(1.0);
  const GuidanceConfig& g = cfg_.guidance;
  const CurvedLos curved = curve_los(u, seeker_out_, g.effective_curvature());

  const Vec3 target_cmd = commanded_accel(ic_.maneuver, state_.t, state_.target_vel());
  const Vec3 target_accel =
      realized_target_accel(target_cmd, state_.target_altitude(), state_.target_speed);

  const Vec3 command =
      g.law == GuidanceLaw::kApn
          ? apn_accel(curved, seeker_out_.closing_velocity, seeker_out_.rel_vel,
                      state_.missile_dir(), target_accel, g)
          : tpn_accel(curved, seeker_out_.closing_velocity, seeker_out_.rel_vel,
                      state_.missile_dir(), g);

  GuidanceSample sample;
  sample.accel.missile = fcs_.update(command, state_.missile_altitude(), state_.missile_speed,
                                     cfg_.integration.guidance_dt);
  sample.accel.target = target_accel;
  sample.theta_losc = curved.theta.as_vector();
  sample.omega_losc = curved.rate.norm();
  trace_.push_back(make_trace_row(state_, sample));
  result_.accel_samples.push_back(sample.accel.missile.norm());
  result_.target_accel_samples.push_back(target_accel.norm());

  const IntervalResult interval =
      advance_interval(state_, sample.accel, dynamics_, cfg_.integration);
  state_ = interval.state;
  ++steps_;
  done_ = interval.termination != Termination::kRunning;

  StepResult out;
  out.done = done_;
  out.reward = reward(state_.range(), sample.theta_losc.norm(), done_, cfg_.reward);
  result_.total_reward += out.reward.total();
  result_.steps = steps_;
  if (done_) {
    result_.miss = state_.range();
    result_.termination = interval.termination;
  }
  if (state_.range() > 0.0) seeker_out_ = observe();
  out.obs = make_observation(seeker_out_);
  return out;
}

EpisodeResult run_episode(const ScenarioConfig& cfg, Agent& agent, std::uint64_t seed,
                          std::vector<TraceRow>* trace) {
  EngagementEnv env(cfg);
  Observation obs = env.reset(seed);
  agent.begin_episode();
  while (!env.done()) {
    obs = env.step(agent.act(obs)).obs;
  }
  if (trace != nullptr) *trace = env.trace();
  return env.result();
}

}  // namespace losc
