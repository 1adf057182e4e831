#pragma once

#include "losc/types.hpp"

namespace losc {

/// Euler 3-2-1 (yaw, pitch, roll) attitude in radians.
struct Euler321 {
  double yaw = 0.0;
  double pitch = 0.0;
  double roll = 0.0;

  Vec3 as_vector() const { return {yaw, pitch, roll}; }
  static Euler321 from_vector(const Vec3& v) { return {v.x(), v.y(), v.z()}; }
};

using Dcm = Mat3;

/// Frame-rotation (passive) DCM for a 3-2-1 sequence: C = R1(roll) R2(pitch) R3(yaw).
/// With yaw = pi/2 the x axis maps to -y.
Dcm euler321_to_dcm(const Euler321& e);

/// Unit vector along v. Throws kInvalidArgument for a zero vector.
Vec3 unit(const Vec3& v);

/// Any unit vector orthogonal to v, built from the coordinate axis least
/// aligned with v.
Vec3 any_orthogonal(const Vec3& v);

/// arccos with the [-1, 1] clamp used by every angle computation here.
double safe_acos(double c);

/// Required planar lead angle L = asin(v_T sin(beta + gamma) / v_M).
/// Arguments beyond 1 + 1e-9 in magnitude throw kInfeasibleLead.
double lead_angle_planar(double target_speed, double missile_speed,
                         double beta_plus_gamma);

/// Missile velocity (magnitude `missile_speed`) that puts the missile on a
/// collision triangle with a constant-velocity target.
///
/// The engagement plane has normal v_T x lambda; the target velocity and LOS
/// are expressed in that plane with the LOS as the first axis, the planar lead
/// angle is solved, and the planar velocity is rotated back to the inertial
/// frame. When v_T is parallel to the LOS (or zero) any plane containing the
/// LOS works, and the normal is taken from the least-aligned coordinate axis.
Vec3 collision_velocity_3d(const Vec3& r_tm, const Vec3& v_t,
                           double missile_speed);

/// Rotates v uniformly onto the spherical cap of half-angle `heading_error`
/// around its own direction. Magnitude is preserved. heading_error = 0 returns v.
Vec3 perturb_heading(const Vec3& v, double heading_error, Rng& rng);

/// Uniform direction within the cone of half-angle `half_apex` about `axis`
/// (uniform in cos(theta) and azimuth).
Vec3 sample_cone_direction(const Vec3& axis, double half_apex, Rng& rng);

/// Look angle arccos(lambda . v_M_hat), both inputs unit vectors.
double look_angle(const Vec3& los, const Vec3& missile_dir);

/// Closing velocity -r_tm . v_tm / |r_tm|.
double closing_velocity(const Vec3& r_tm, const Vec3& v_tm);

}  // namespace losc
