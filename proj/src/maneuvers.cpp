#include "losc/maneuvers.hpp"

#include <algorithm>
#include <cmath>

#include "losc/geometry.hpp"

namespace losc {

const char* to_string(ManeuverKind k) {
  switch (k) {
    case ManeuverKind::kBangBang: return "bang-bang";
    case ManeuverKind::kWeave: return "weave";
    case ManeuverKind::kJink: return "jink";
  }
  return "unknown";
}

double ManeuverSpec::signed_magnitude(double t) const {
  if (t < start_time || accel_level == 0.0) return 0.0;
  const double tau = t - start_time;
  switch (kind) {
    case ManeuverKind::kBangBang:
      return phase_sign * (tau < duration ? accel_level : -accel_level);
    case ManeuverKind::kWeave:
      return phase_sign * accel_level * std::sin(2.0 * kPi * tau / period);
    case ManeuverKind::kJink: {
      const auto flips = std::upper_bound(switch_times.begin(), switch_times.end(), t) -
                         switch_times.begin();
      return (flips % 2 == 0 ? phase_sign : -phase_sign) * accel_level;
    }
  }
  return 0.0;
}

ManeuverSpec sample_maneuver(const ManeuverConfig& cfg, double target_max_accel, Rng& rng,
                             double expected_tof) {
  if (target_max_accel < 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "target max acceleration must be >= 0");
  }
  ManeuverSpec spec;
  spec.kind = static_cast<ManeuverKind>(std::uniform_int_distribution<int>(0, 2)(rng));
  const bool use_max = uniform(rng, 0.0, 1.0) < cfg.p_max_accel;
  const double level_draw = uniform(rng, 0.0, target_max_accel);
  spec.accel_level = use_max ? target_max_accel : level_draw;
  spec.phase_sign = uniform(rng, 0.0, 1.0) < 0.5 ? 1.0 : -1.0;
  spec.start_time = cfg.initiation_time.sample(rng);

  // Every branch consumes the same draws so later streams stay aligned.
  const double duration = cfg.bang_bang_duration.sample(rng);
  const double short_period = cfg.weave_period.sample(rng);
  const double long_draw = uniform(rng, 0.0, 1.0);
  const double long_u = uniform(rng, 0.0, 1.0);

  switch (spec.kind) {
    case ManeuverKind::kBangBang:
      spec.duration = duration;
      break;
    case ManeuverKind::kWeave: {
      spec.period = short_period;
      const double long_max = 2.0 * expected_tof;
      if (cfg.long_weave && long_draw < cfg.p_long_weave && long_max > cfg.weave_period.max) {
        spec.period = cfg.weave_period.max + long_u * (long_max - cfg.weave_period.max);
      }
      break;
    }
    case ManeuverKind::kJink: {
      double t = spec.start_time;
      while (t < cfg.horizon) {
        t += cfg.jink_interval.sample(rng);
        spec.switch_times.push_back(t);
      }
      break;
    }
  }
  return spec;
}

Vec3 commanded_accel(const ManeuverSpec& spec, double t, const Vec3& target_vel) {
  const double magnitude = spec.signed_magnitude(t);
  if (magnitude == 0.0) return Vec3::Zero();
  const Vec3 v_hat = unit(target_vel);
  Vec3 lateral = spec.turn_axis.cross(v_hat);
  if (lateral.norm() < 1e-9) lateral = any_orthogonal(v_hat);
  lateral -= lateral.dot(v_hat) * v_hat;
  return magnitude * lateral.normalized();
}

}  // namespace losc
