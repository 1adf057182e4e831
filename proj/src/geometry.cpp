#include "losc/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace losc {

namespace {

constexpr double kAsinGuard = 1e-9;

}  // namespace

Dcm euler321_to_dcm(const Euler321& e) {
  const double cy = std::cos(e.yaw), sy = std::sin(e.yaw);
  const double cp = std::cos(e.pitch), sp = std::sin(e.pitch);
  const double cr = std::cos(e.roll), sr = std::sin(e.roll);

  Dcm c;
  c << cp * cy, cp * sy, -sp,
      sr * sp * cy - cr * sy, sr * sp * sy + cr * cy, sr * cp,
      cr * sp * cy + sr * sy, cr * sp * sy - sr * cy, cr * cp;
  return c;
}

Vec3 unit(const Vec3& v) {
  const double n = v.norm();
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw Error(ErrorCode::kInvalidArgument, "cannot normalize a zero or non-finite vector");
  }
  return v / n;
}

Vec3 any_orthogonal(const Vec3& v) {
  const Vec3 a = v.cwiseAbs();
  Vec3 axis = Vec3::UnitX();
  if (a.y() <= a.x() && a.y() <= a.z()) {
    axis = Vec3::UnitY();
  } else if (a.z() <= a.x() && a.z() <= a.y()) {
    axis = Vec3::UnitZ();
  }
  return unit(v.cross(axis));
}

double safe_acos(double c) { return std::acos(std::clamp(c, -1.0, 1.0)); }

double lead_angle_planar(double target_speed, double missile_speed,
                         double beta_plus_gamma) {
  if (!(missile_speed > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "missile speed must be positive");
  }
  const double arg = target_speed * std::sin(beta_plus_gamma) / missile_speed;
  if (std::abs(arg) > 1.0 + kAsinGuard) {
    throw Error(ErrorCode::kInfeasibleLead,
                "no collision triangle: target crossing speed exceeds missile speed");
  }
  return std::asin(std::clamp(arg, -1.0, 1.0));
}

Vec3 collision_velocity_3d(const Vec3& r_tm, const Vec3& v_t, double missile_speed) {
  if (!(missile_speed > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "missile speed must be positive");
  }
  const Vec3 los = unit(r_tm);
  const double target_speed = v_t.norm();
  if (target_speed == 0.0) return missile_speed * los;

  Vec3 normal = (v_t / target_speed).cross(los);
  if (normal.norm() < 1e-12) {
    normal = any_orthogonal(los);
  } else {
    normal.normalize();
  }

  // Planar frame: first axis along the LOS, so the LOS angle gamma is zero and
  // beta is the angle of v_T measured from the reversed LOS.
  const Vec3 e1 = los;
  const Vec3 e2 = normal.cross(e1);
  const double vt1 = v_t.dot(e1);
  const double vt2 = v_t.dot(e2);
  const double gamma = 0.0;
  const double beta = std::atan2(vt2, -vt1);

  const double lead = lead_angle_planar(target_speed, missile_speed, beta + gamma);
  const double vm1 = missile_speed * std::cos(lead + gamma);
  const double vm2 = missile_speed * std::sin(lead + gamma);
  return vm1 * e1 + vm2 * e2;
}

Vec3 sample_cone_direction(const Vec3& axis, double half_apex, Rng& rng) {
  const Vec3 a = unit(axis);
  if (half_apex <= 0.0) return a;
  const double cos_theta = uniform(rng, std::cos(half_apex), 1.0);
  const double phi = uniform(rng, 0.0, 2.0 * kPi);
  const double sin_theta = std::sqrt(std::max(0.0, 1.0 - cos_theta * cos_theta));
  const Vec3 b1 = any_orthogonal(a);
  const Vec3 b2 = a.cross(b1);
  return cos_theta * a + sin_theta * (std::cos(phi) * b1 + std::sin(phi) * b2);
}

Vec3 perturb_heading(const Vec3& v, double heading_error, Rng& rng) {
  if (heading_error <= 0.0) return v;
  const double speed = v.norm();
  Vec3 dir = sample_cone_direction(v, heading_error, rng);
  // The cap is closed at cos(HE); keep the contract strict.
  if (safe_acos(dir.dot(v / speed)) >= heading_error) dir = v / speed;
  return speed * dir;
}

double look_angle(const Vec3& los, const Vec3& missile_dir) {
  return safe_acos(los.dot(missile_dir));
}

double closing_velocity(const Vec3& r_tm, const Vec3& v_tm) {
  return -r_tm.dot(v_tm) / r_tm.norm();
}

}  // namespace losc
