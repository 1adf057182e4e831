#include "losc/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

namespace losc {

namespace {

constexpr double kTargetMaxSpeed = 600.0;

Vec3 scaled_direction(const Vec3& raw, double speed) {
  const double n = raw.norm();
  if (n == 0.0) return Vec3::Zero();
  return raw * (speed / n);
}

struct StateDerivative {
  BodyDerivative missile;
  BodyDerivative target;
};

StateDerivative derivatives(const EngagementState& s, const Accelerations& a,
                            const DynamicsParams& p) {
  return {missile_derivatives(s, a.missile, p.missile),
          target_derivatives(s, a.target, p.target)};
}

EngagementState advance(const EngagementState& s, const StateDerivative& d, double h) {
  EngagementState out = s;
  out.t = s.t + h;
  out.missile_pos += h * d.missile.pos_dot;
  out.missile_vel_raw += h * d.missile.vel_raw_dot;
  out.missile_speed += h * d.missile.speed_dot;
  out.target_pos += h * d.target.pos_dot;
  out.target_vel_raw += h * d.target.vel_raw_dot;
  out.target_speed += h * d.target.speed_dot;
  return out;
}

BodyDerivative combine(const BodyDerivative& k1, const BodyDerivative& k2,
                       const BodyDerivative& k3, const BodyDerivative& k4) {
  return {(k1.pos_dot + 2.0 * k2.pos_dot + 2.0 * k3.pos_dot + k4.pos_dot) / 6.0,
          (k1.vel_raw_dot + 2.0 * k2.vel_raw_dot + 2.0 * k3.vel_raw_dot + k4.vel_raw_dot) / 6.0,
          (k1.speed_dot + 2.0 * k2.speed_dot + 2.0 * k3.speed_dot + k4.speed_dot) / 6.0};
}

}  // namespace

double density(double altitude) {
  return kSeaLevelDensity * std::exp(-std::max(altitude, 0.0) / kScaleHeight);
}

EngagementState EngagementState::from_velocities(double t, const Vec3& r_m, const Vec3& v_m,
                                                 const Vec3& r_t, const Vec3& v_t) {
  EngagementState s;
  s.t = t;
  s.missile_pos = r_m;
  s.missile_vel_raw = v_m;
  s.missile_speed = v_m.norm();
  s.target_pos = r_t;
  s.target_vel_raw = v_t;
  s.target_speed = v_t.norm();
  return s;
}

Vec3 EngagementState::missile_vel() const {
  return scaled_direction(missile_vel_raw, missile_speed);
}

Vec3 EngagementState::target_vel() const {
  return scaled_direction(target_vel_raw, target_speed);
}

double EngagementState::closing_velocity() const {
  const Vec3 r = rel_pos();
  return -r.dot(rel_vel()) / r.norm();
}

namespace {

// The drag-free velocity is restarted from the physical velocity after every
// step. Scaling its rate by |v_raw| / V keeps the turn rate at a / V inside the
// step too, which is the limit of restarting it continuously, so the result
// does not depend on the step size.
Vec3 raw_velocity_rate(const Vec3& accel, const Vec3& vel_raw, double speed) {
  return speed > 0.0 ? accel * (vel_raw.norm() / speed) : accel;
}

}  // namespace

BodyDerivative missile_derivatives(const EngagementState& s, const Vec3& accel,
                                   const MissileDragParams& p) {
  const double q = 0.5 * density(s.missile_altitude()) * s.missile_speed * s.missile_speed;
  return {s.missile_vel(), raw_velocity_rate(accel, s.missile_vel_raw, s.missile_speed),
          -q * p.cd0 * p.s_ref / p.mass - p.k * accel.norm()};
}

BodyDerivative target_derivatives(const EngagementState& s, const Vec3& accel,
                                  const TargetDragParams& p) {
  const double v = s.target_speed;
  return {s.target_vel(), raw_velocity_rate(accel, s.target_vel_raw, v),
          -density(s.target_altitude()) * v * v * p.cd0 / (2.0 * p.mass) - p.k * accel.norm()};
}

Vec3 realized_target_accel(const Vec3& commanded, double altitude, double speed) {
  const double ratio = density(altitude) * speed * speed /
                       (kSeaLevelDensity * kTargetMaxSpeed * kTargetMaxSpeed);
  return commanded * ratio;
}

EngagementState rk4_step(const EngagementState& s, const Accelerations& accel,
                         const DynamicsParams& p, double dt) {
  if (!(dt > 0.0)) throw Error(ErrorCode::kInvalidArgument, "rk4 step requires dt > 0");

  const StateDerivative k1 = derivatives(s, accel, p);
  const StateDerivative k2 = derivatives(advance(s, k1, 0.5 * dt), accel, p);
  const StateDerivative k3 = derivatives(advance(s, k2, 0.5 * dt), accel, p);
  const StateDerivative k4 = derivatives(advance(s, k3, dt), accel, p);

  const StateDerivative slope{combine(k1.missile, k2.missile, k3.missile, k4.missile),
                              combine(k1.target, k2.target, k3.target, k4.target)};
  EngagementState out = advance(s, slope, dt);
  out.missile_speed = std::max(out.missile_speed, 0.0);
  out.target_speed = std::max(out.target_speed, 0.0);
  // Restart the drag-free velocities from the physical velocities so the
  // next step turns at a / V.
  if (out.missile_vel_raw.norm() > 0.0) out.missile_vel_raw = out.missile_vel();
  if (out.target_vel_raw.norm() > 0.0 && out.target_speed > 0.0) {
    out.target_vel_raw = out.target_vel();
  }
  return out;
}

const char* to_string(Termination t) {
  switch (t) {
    case Termination::kRunning: return "running";
    case Termination::kClosingReversed: return "closing_reversed";
    case Termination::kTimeCap: return "time_cap";
  }
  return "unknown";
}

IntervalResult advance_interval(const EngagementState& s, const Accelerations& accel,
                                const DynamicsParams& p, const IntegrationConfig& cfg) {
  IntervalResult result{s, Termination::kRunning};
  bool fine = cfg.fine_everywhere || s.range() <= cfg.fine_range;
  if (!fine) {
    result.state = rk4_step(s, accel, p, cfg.guidance_dt);
    // A coarse step that reaches the fine region or passes closest approach is
    // discarded and the interval is redone with fine sub-steps.
    if (result.state.closing_velocity() < 0.0 || result.state.range() <= cfg.fine_range) {
      result.state = s;
      fine = true;
    }
  }
  if (fine) {
    const auto substeps =
        static_cast<int>(std::llround(cfg.guidance_dt / cfg.fine_dt));
    for (int i = 0; i < substeps; ++i) {
      result.state = rk4_step(result.state, accel, p, cfg.fine_dt);
      if (result.state.closing_velocity() < 0.0) {
        result.termination = Termination::kClosingReversed;
        break;
      }
    }
  }
  if (result.termination == Termination::kRunning && result.state.t >= cfg.time_cap - 1e-12) {
    result.termination = Termination::kTimeCap;
  }
  return result;
}

TraceRow make_trace_row(const EngagementState& s, const GuidanceSample& g) {
  TraceRow row;
  row.t = s.t;
  row.missile_pos = s.missile_pos;
  row.target_pos = s.target_pos;
  row.missile_vel = s.missile_vel();
  row.target_vel = s.target_vel();
  row.missile_accel = g.accel.missile.norm();
  row.target_accel = g.accel.target.norm();
  row.theta_losc = g.theta_losc;
  row.omega_losc = g.omega_losc;
  return row;
}

EpisodeTrace integrate_to_termination(const EngagementState& s, const Controller& controller,
                                      const DynamicsParams& p, const IntegrationConfig& cfg) {
  EpisodeTrace trace;
  trace.final_state = s;
  if (s.closing_velocity() < 0.0) {
    trace.rows.push_back(make_trace_row(s, GuidanceSample{}));
    trace.termination = Termination::kClosingReversed;
    trace.miss = s.range();
    return trace;
  }

  EngagementState state = s;
  while (true) {
    const GuidanceSample g = controller(state);
    trace.rows.push_back(make_trace_row(state, g));
    const IntervalResult r = advance_interval(state, g.accel, p, cfg);
    state = r.state;
    if (r.termination != Termination::kRunning) {
      trace.termination = r.termination;
      break;
    }
  }
  trace.final_state = state;
  trace.miss = state.range();
  return trace;
}

void write_trace(std::ostream& os, const std::vector<TraceRow>& rows) {
  os << "# t rm_x rm_y rm_z rt_x rt_y rt_z vm_x vm_y vm_z vt_x vt_y vt_z"
        " a_m a_t theta_yaw theta_pitch theta_roll omega_losc\n";
  const auto flags = os.flags();
  const auto precision = os.precision();
  os << std::setprecision(10);
  for (const TraceRow& r : rows) {
    os << r.t;
    for (const Vec3* v : {&r.missile_pos, &r.target_pos, &r.missile_vel, &r.target_vel}) {
      os << ' ' << v->x() << ' ' << v->y() << ' ' << v->z();
    }
    os << ' ' << r.missile_accel << ' ' << r.target_accel << ' ' << r.theta_losc.x() << ' '
       << r.theta_losc.y() << ' ' << r.theta_losc.z() << ' ' << r.omega_losc << '\n';
  }
  os.flags(flags);
  os.precision(precision);
}

}  // namespace losc
