#pragma once

#include <functional>
#include <iosfwd>
#include <vector>

#include "losc/types.hpp"

namespace losc {

inline constexpr double kSeaLevelDensity = 1.225;
inline constexpr double kScaleHeight = 8500.0;

/// Exponential atmosphere, clamped to the sea-level value below h = 0.
double density(double altitude);

struct MissileDragParams {
  double k = 0.25;       // induced-drag factor on |a_M|
  double mass = 450.0;   // kg
  double cd0 = 0.35;
  double s_ref = 1.0;    // m^2, multiplies cd0

  friend bool operator==(const MissileDragParams&, const MissileDragParams&) = default;
};

struct TargetDragParams {
  double k = 0.0;
  double cd0 = 0.0;
  double mass = 450.0;

  friend bool operator==(const TargetDragParams&, const TargetDragParams&) = default;
};

struct DynamicsParams {
  MissileDragParams missile;
  TargetDragParams target;
};

/// Ground-truth engagement state. The integrator carries the drag-free
/// velocities (`missile_vel_raw`, `target_vel_raw`) whose directions, scaled by
/// the drag-integrated speeds, give the physical velocities.
struct EngagementState {
  double t = 0.0;
  Vec3 missile_pos = Vec3::Zero();
  Vec3 missile_vel_raw = Vec3::UnitX();
  double missile_speed = 1.0;
  Vec3 target_pos = Vec3::Zero();
  Vec3 target_vel_raw = Vec3::UnitX();
  double target_speed = 0.0;

  static EngagementState from_velocities(double t, const Vec3& r_m, const Vec3& v_m,
                                         const Vec3& r_t, const Vec3& v_t);

  Vec3 missile_vel() const;
  Vec3 target_vel() const;
  Vec3 missile_dir() const { return missile_vel_raw.normalized(); }
  Vec3 rel_pos() const { return target_pos - missile_pos; }
  Vec3 rel_vel() const { return target_vel() - missile_vel(); }
  double range() const { return rel_pos().norm(); }
  double closing_velocity() const;
  double missile_altitude() const { return missile_pos.z(); }
  double target_altitude() const { return target_pos.z(); }
};

struct Accelerations {
  Vec3 missile = Vec3::Zero();
  Vec3 target = Vec3::Zero();
};

struct BodyDerivative {
  Vec3 pos_dot;
  Vec3 vel_raw_dot;
  double speed_dot = 0.0;
};

BodyDerivative missile_derivatives(const EngagementState& s, const Vec3& accel,
                                   const MissileDragParams& p);
BodyDerivative target_derivatives(const EngagementState& s, const Vec3& accel,
                                  const TargetDragParams& p);

/// Commanded target acceleration reduced by the dynamic-pressure ratio
/// relative to sea level at the 600 m/s maximum target speed.
Vec3 realized_target_accel(const Vec3& commanded, double altitude, double speed);

/// One classic RK4 step with accelerations held constant. Afterwards the raw
/// velocities are re-scaled to the integrated speeds. dt <= 0 throws.
EngagementState rk4_step(const EngagementState& s, const Accelerations& accel,
                         const DynamicsParams& p, double dt);

struct IntegrationConfig {
  double guidance_dt = 0.02;   // input refresh interval, also the coarse step
  double fine_dt = 2e-4;
  double fine_range = 80.0;    // fine stepping below this range
  double time_cap = 40.0;
  bool fine_everywhere = false;

  friend bool operator==(const IntegrationConfig&, const IntegrationConfig&) = default;
};

enum class Termination { kRunning, kClosingReversed, kTimeCap };

const char* to_string(Termination t);

struct IntervalResult {
  EngagementState state;
  Termination termination = Termination::kRunning;
};

/// Advances one guidance interval with held accelerations. Intervals that start
/// or would end inside `fine_range`, or would pass closest approach, use fine
/// sub-steps and stop at the first one where the closing velocity turns negative.
IntervalResult advance_interval(const EngagementState& s, const Accelerations& accel,
                                const DynamicsParams& p, const IntegrationConfig& cfg);

struct TraceRow {
  double t = 0.0;
  Vec3 missile_pos, target_pos, missile_vel, target_vel;
  double missile_accel = 0.0;
  double target_accel = 0.0;
  Vec3 theta_losc = Vec3::Zero();
  double omega_losc = 0.0;
};

struct GuidanceSample {
  Accelerations accel;
  Vec3 theta_losc = Vec3::Zero();
  double omega_losc = 0.0;
};

using Controller = std::function<GuidanceSample(const EngagementState&)>;

struct EpisodeTrace {
  std::vector<TraceRow> rows;
  EngagementState final_state;
  Termination termination = Termination::kRunning;
  double miss = 0.0;
};

/// Runs the controller every guidance interval until the closing velocity
/// reverses or the time cap is reached. One trace row per guidance step.
EpisodeTrace integrate_to_termination(const EngagementState& s, const Controller& controller,
                                      const DynamicsParams& p, const IntegrationConfig& cfg);

TraceRow make_trace_row(const EngagementState& s, const GuidanceSample& g);

/// Columnar text: one header line, then one whitespace-separated row per step.
/// Columns: t rm_x rm_y rm_z rt_x rt_y rt_z vm_x vm_y vm_z vt_x vt_y vt_z
///          a_m a_t theta_yaw theta_pitch theta_roll omega_losc
void write_trace(std::ostream& os, const std::vector<TraceRow>& rows);

inline constexpr int kTraceColumns = 19;

}  // namespace losc
