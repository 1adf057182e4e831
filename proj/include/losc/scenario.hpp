#pragma once

#include "losc/dynamics.hpp"
#include "losc/guidance.hpp"
#include "losc/maneuvers.hpp"
#include "losc/seeker.hpp"
#include "losc/types.hpp"

namespace losc {

enum class TargetDragMode { kNone, kRandomized };

const char* to_string(TargetDragMode m);
TargetDragMode parse_drag_mode(const std::string& name);

struct RewardParams {
  double alpha = -0.01;          // curvature penalty per unit |theta_losc|
  double beta = 10.0;            // hit bonus inside r_lim
  double r_lim = 1.0;            // m
  double epsilon = 20.0;         // Gaussian terminal bonus scale
  double sigma = 1.0;            // m
  double gamma_shaping = 0.95;
  double gamma_terminal = 0.995;

  friend bool operator==(const RewardParams&, const RewardParams&) = default;
};

/// Everything an engagement episode is sampled from. Angles in degrees where
/// the field name says so; accelerations in g where the name says so.
struct ScenarioConfig {
  Interval range_m{5000.0, 10000.0};
  Interval elevation_deg{-30.0, 30.0};
  Interval missile_speed{800.0, 1000.0};
  Interval target_speed{400.0, 600.0};
  double target_cone_half_apex_deg = 30.0;
  Interval heading_error_deg{0.0, 5.0};
  Interval target_max_accel_g{0.0, 30.0};
  Interval missile_altitude_m{2000.0, 10000.0};
  Interval azimuth_deg{0.0, 360.0};

  bool radome_enabled = true;
  Interval radome_amplitude{-1e-2, 1e-2};
  Interval radome_k{1.0, 3.0};
  double sigma_los = 1e-3;       // rad
  double seeker_lag_tau = 0.02;  // s

  TargetDragMode target_drag = TargetDragMode::kNone;
  Interval target_k{1.0 / 8.0, 1.0 / 3.0};
  Interval target_cd0{0.125, 0.4};
  double target_mass = 450.0;
  MissileDragParams missile;

  ManeuverConfig maneuver;
  GuidanceConfig guidance;
  IntegrationConfig integration;
  RewardParams reward;

  int max_resample = 100;

  /// Throws kConfig when any bound pair is reversed or a constant is out of range.
  void validate() const;

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

struct InitialConditions {
  Vec3 missile_pos, missile_vel, target_pos, target_vel;
  double missile_max_accel_ref = 0.0;  // m/s^2
  double target_max_accel_ref = 0.0;   // m/s^2
  double heading_error = 0.0;          // rad
  RadomeParams radome;
  ManeuverSpec maneuver;
  TargetDragParams target_drag;

  EngagementState state() const {
    return EngagementState::from_velocities(0.0, missile_pos, missile_vel, target_pos,
                                            target_vel);
  }
};

/// Draws one engagement. Infeasible collision geometry is resampled up to
/// `max_resample` times before kInfeasibleLead is reported.
InitialConditions sample_initial_conditions(const ScenarioConfig& cfg, Rng& rng);

}  // namespace losc
