#include "losc/seeker.hpp"

#include <cmath>

namespace losc {

namespace {

double refraction_profile(double look, double amplitude, double k) {
  return amplitude * (0.75 * look / (kPi / 2.0) + 0.25 * std::cos(2.0 * kPi / k * look));
}

}  // namespace

RefractionAngles refraction_angles(double look, const RadomeParams& p) {
  return {refraction_profile(look, p.a_u, p.k_u), refraction_profile(look, p.a_v, p.k_v)};
}

double refraction_slope_u(double look, const RadomeParams& p) {
  const double w = 2.0 * kPi / p.k_u;
  return p.a_u * (0.75 / (kPi / 2.0) - 0.25 * w * std::sin(w * look));
}

Vec3 distorted_los(const Vec3& los, const Vec3& missile_dir, const RadomeParams& p,
                   const Euler321& noise) {
  const RefractionAngles q = refraction_angles(look_angle(los, missile_dir), p);
  const Vec3 refracted = euler321_to_dcm({q.u, q.v, 0.0}) * los;
  return euler321_to_dcm(noise) * refracted;
}

Euler321 sample_los_noise(double sigma, Rng& rng) {
  if (sigma <= 0.0) return {};
  std::normal_distribution<double> n(0.0, sigma);
  const double yaw = n(rng);
  const double pitch = n(rng);
  const double roll = n(rng);
  return {yaw, pitch, roll};
}

Vec3 Seeker::apparent_los(const Vec3& los, const Vec3& missile_dir, double dt, Rng& rng) {
  const Euler321 noise = sample_los_noise(sigma_, rng);
  const Vec3 raw = distorted_los(los, missile_dir, radome_, noise);
  return lag_.update(raw, dt).normalized();
}

Vec3 los_rotation_rate(const Vec3& los, double range, const Vec3& v_tm) {
  const Vec3 r = los * range;
  return r.cross(v_tm) / r.dot(r);
}

SeekerOutput nav_outputs(const Vec3& apparent_los, const Vec3& r_tm, const Vec3& v_tm) {
  SeekerOutput out;
  out.range = r_tm.norm();
  if (!(out.range > 0.0)) throw Error(ErrorCode::kInvalidArgument, "zero range");
  out.los = apparent_los;
  out.closing_velocity = -apparent_los.dot(v_tm);
  out.los_rate = los_rotation_rate(apparent_los, out.range, v_tm);
  out.rel_vel = v_tm;
  return out;
}

}  // namespace losc
