#include "losc/guidance.hpp"

#include <algorithm>

#include "losc/dynamics.hpp"

namespace losc {

const char* to_string(GuidanceLaw law) {
  switch (law) {
    case GuidanceLaw::kPn: return "pn";
    case GuidanceLaw::kApn: return "apn";
    case GuidanceLaw::kPnLosc: return "pn-losc";
  }
  return "unknown";
}

GuidanceLaw parse_law(const std::string& name) {
  if (name == "pn") return GuidanceLaw::kPn;
  if (name == "apn") return GuidanceLaw::kApn;
  if (name == "pn-losc" || name == "pn_losc") return GuidanceLaw::kPnLosc;
  throw Error(ErrorCode::kConfig, "unknown guidance law '" + name + "' (pn, apn, pn-losc)");
}

const char* to_string(PerpFrame f) {
  return f == PerpFrame::kRelative ? "relative" : "missile";
}

PerpFrame parse_perp_frame(const std::string& name) {
  if (name == "relative") return PerpFrame::kRelative;
  if (name == "missile") return PerpFrame::kMissile;
  throw Error(ErrorCode::kConfig, "unknown perpendicular frame '" + name + "'");
}

CurvedLos curve_los(const Vec3& action, const SeekerOutput& seeker, double curvature_scale) {
  CurvedLos c;
  c.theta = Euler321::from_vector(curvature_scale * action);
  c.los = euler321_to_dcm(c.theta) * seeker.los;
  c.rate = los_rotation_rate(c.los, seeker.range, seeker.rel_vel);
  return c;
}

namespace {

Vec3 project_off_axis(const Vec3& a, const Vec3& rel_vel, const Vec3& missile_dir,
                      PerpFrame frame) {
  const Vec3 axis = frame == PerpFrame::kRelative ? rel_vel : missile_dir;
  const double n = axis.norm();
  if (n == 0.0) return a;
  const Vec3 axis_hat = axis / n;
  return a - a.dot(axis_hat) * axis_hat;
}

}  // namespace

Vec3 tpn_accel(const CurvedLos& c, double closing_velocity, const Vec3& rel_vel,
               const Vec3& missile_dir, const GuidanceConfig& cfg) {
  const Vec3 a = -cfg.nav_constant * closing_velocity * c.los.cross(c.rate);
  return project_off_axis(a, rel_vel, missile_dir, cfg.perp_frame);
}

Vec3 apn_accel(const CurvedLos& c, double closing_velocity, const Vec3& rel_vel,
               const Vec3& missile_dir, const Vec3& target_accel, const GuidanceConfig& cfg) {
  const Vec3 a = -cfg.nav_constant * closing_velocity * c.los.cross(c.rate) +
                 cfg.nav_constant * target_accel / 2.0;
  return project_off_axis(a, rel_vel, missile_dir, cfg.perp_frame);
}

double dynamic_pressure_limit(double altitude, double speed, double accel_ref) {
  return density(altitude) * speed * speed / (kSeaLevelDensity * 1000.0 * 1000.0) * accel_ref;
}

FlightControl::FlightControl(const GuidanceConfig& cfg)
    : accel_ref_(cfg.accel_ref),
      accel_max_(cfg.accel_max),
      fcs_lag_(cfg.fcs_tau),
      actuator_lag_(cfg.actuator_tau) {
  reset();
}

void FlightControl::reset() {
  fcs_lag_.reset(0.0);
  actuator_lag_.reset(Vec3::Zero());
  last_dir_ = Vec3::Zero();
}

Vec3 FlightControl::update(const Vec3& commanded, double altitude, double speed, double dt) {
  const double magnitude = commanded.norm();
  const double q_limit = dynamic_pressure_limit(altitude, speed, accel_ref_);
  const double clipped = std::clamp(std::clamp(magnitude, 0.0, q_limit), 0.0, accel_max_);
  const double lagged = fcs_lag_.update(clipped, dt);
  if (magnitude > 0.0) last_dir_ = commanded / magnitude;
  return actuator_lag_.update(lagged * last_dir_, dt);
}

}  // namespace losc
