#include "losc/scenario.hpp"

#include <cmath>
#include <string>

#include "losc/geometry.hpp"

namespace losc {

const char* to_string(TargetDragMode m) {
  return m == TargetDragMode::kNone ? "none" : "randomized";
}

TargetDragMode parse_drag_mode(const std::string& name) {
  if (name == "none") return TargetDragMode::kNone;
  if (name == "randomized") return TargetDragMode::kRandomized;
  throw Error(ErrorCode::kConfig, "unknown target drag mode '" + name + "' (none, randomized)");
}

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::kConfig, what);
}

void require_ordered(const Interval& i, const char* name) {
  require(std::isfinite(i.min) && std::isfinite(i.max) && i.well_ordered(),
          std::string(name) + ": bounds must be finite with min <= max");
}

}  // namespace

void ScenarioConfig::validate() const {
  require_ordered(range_m, "range_m");
  require_ordered(elevation_deg, "elevation_deg");
  require_ordered(missile_speed, "missile_speed");
  require_ordered(target_speed, "target_speed");
  require_ordered(heading_error_deg, "heading_error_deg");
  require_ordered(target_max_accel_g, "target_max_accel_g");
  require_ordered(missile_altitude_m, "missile_altitude_m");
  require_ordered(azimuth_deg, "azimuth_deg");
  require_ordered(radome_amplitude, "radome_amplitude");
  require_ordered(radome_k, "radome_k");
  require_ordered(target_k, "target_k");
  require_ordered(target_cd0, "target_cd0");
  require_ordered(maneuver.bang_bang_duration, "maneuver.bang_bang_duration");
  require_ordered(maneuver.initiation_time, "maneuver.initiation_time");
  require_ordered(maneuver.weave_period, "maneuver.weave_period");
  require_ordered(maneuver.jink_interval, "maneuver.jink_interval");

  require(range_m.min > 0.0, "range_m.min must be > 0");
  require(missile_speed.min > 0.0, "missile_speed.min must be > 0");
  require(target_speed.min >= 0.0, "target_speed.min must be >= 0");
  require(heading_error_deg.min >= 0.0, "heading_error_deg.min must be >= 0");
  require(target_max_accel_g.min >= 0.0, "target_max_accel_g.min must be >= 0");
  require(radome_k.min > 0.0, "radome_k.min must be > 0");
  require(maneuver.weave_period.min > 0.0, "maneuver.weave_period.min must be > 0");
  require(maneuver.jink_interval.min > 0.0, "maneuver.jink_interval.min must be > 0");
  require(target_cone_half_apex_deg >= 0.0 && target_cone_half_apex_deg < 90.0,
          "target_cone_half_apex_deg must be in [0, 90)");
  require(sigma_los >= 0.0, "sigma_los must be >= 0");
  require(seeker_lag_tau > 0.0, "seeker_lag_tau must be > 0");
  require(target_mass > 0.0, "target_mass must be > 0");
  require(missile.mass > 0.0 && missile.cd0 >= 0.0 && missile.k >= 0.0 && missile.s_ref >= 0.0,
          "missile drag parameters must be nonnegative with positive mass");

  require(guidance.nav_constant > 0.0, "guidance.nav_constant must be > 0");
  require(guidance.curvature_scale >= 0.0, "guidance.curvature_scale must be >= 0");
  require(guidance.fcs_tau > 0.0 && guidance.actuator_tau > 0.0, "lag time constants must be > 0");
  require(guidance.accel_max >= 0.0 && guidance.accel_ref >= 0.0, "acceleration limits must be >= 0");

  require(integration.guidance_dt > 0.0 && integration.fine_dt > 0.0,
          "integration steps must be > 0");
  require(integration.fine_dt <= integration.guidance_dt, "fine_dt must not exceed guidance_dt");
  require(integration.time_cap > 0.0, "time_cap must be > 0");
  require(reward.sigma > 0.0, "reward.sigma must be > 0");
  require(max_resample >= 1, "max_resample must be >= 1");
}

InitialConditions sample_initial_conditions(const ScenarioConfig& cfg, Rng& rng) {
  for (int attempt = 0; attempt < cfg.max_resample; ++attempt) {
    const double range = cfg.range_m.sample(rng);
    const double elevation = deg_to_rad(cfg.elevation_deg.sample(rng));
    const double azimuth = deg_to_rad(cfg.azimuth_deg.sample(rng));
    const double altitude = cfg.missile_altitude_m.sample(rng);
    const double missile_speed = cfg.missile_speed.sample(rng);
    const double target_speed = cfg.target_speed.sample(rng);

    InitialConditions ic;
    ic.missile_pos = Vec3(0.0, 0.0, altitude);
    const Vec3 los(std::cos(elevation) * std::cos(azimuth),
                   std::cos(elevation) * std::sin(azimuth), std::sin(elevation));
    ic.target_pos = ic.missile_pos + range * los;
    // Cone axis points from the target back toward the missile (closing).
    ic.target_vel =
        target_speed * sample_cone_direction(-los, deg_to_rad(cfg.target_cone_half_apex_deg), rng);

    Vec3 collision;
    try {
      collision = collision_velocity_3d(ic.target_pos - ic.missile_pos, ic.target_vel,
                                        missile_speed);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kInfeasibleLead) continue;
      throw;
    }

    ic.heading_error = deg_to_rad(cfg.heading_error_deg.sample(rng));
    ic.missile_vel = perturb_heading(collision, ic.heading_error, rng);
    ic.missile_max_accel_ref = cfg.guidance.accel_ref;
    ic.target_max_accel_ref = cfg.target_max_accel_g.sample(rng) * kGravity;

    const RadomeParams radome{cfg.radome_amplitude.sample(rng), cfg.radome_amplitude.sample(rng),
                              cfg.radome_k.sample(rng), cfg.radome_k.sample(rng)};
    ic.radome = radome;
    if (!cfg.radome_enabled) ic.radome.a_u = ic.radome.a_v = 0.0;

    const double k_t = cfg.target_k.sample(rng);
    const double cd0_t = cfg.target_cd0.sample(rng);
    ic.target_drag.mass = cfg.target_mass;
    if (cfg.target_drag == TargetDragMode::kRandomized) {
      ic.target_drag.k = k_t;
      ic.target_drag.cd0 = cd0_t;
    }

    std::normal_distribution<double> normal(0.0, 1.0);
    Vec3 axis(normal(rng), normal(rng), normal(rng));
    const Vec3 vt_hat = ic.target_vel.normalized();
    axis -= axis.dot(vt_hat) * vt_hat;
    ic.maneuver.turn_axis = axis.norm() > 1e-9 ? axis.normalized() : any_orthogonal(vt_hat);

    const double closing = closing_velocity(ic.target_pos - ic.missile_pos,
                                            ic.target_vel - ic.missile_vel);
    const double expected_tof = closing > 0.0 ? range / closing : 0.0;
    const Vec3 turn_axis = ic.maneuver.turn_axis;
    ic.maneuver = sample_maneuver(cfg.maneuver, ic.target_max_accel_ref, rng, expected_tof);
    ic.maneuver.turn_axis = turn_axis;
    return ic;
  }
  throw Error(ErrorCode::kInfeasibleLead,
              "no feasible collision geometry after " + std::to_string(cfg.max_resample) +
                  " draws");
}

}  // namespace losc
