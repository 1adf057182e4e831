#pragma once

#include <vector>

#include "losc/types.hpp"

namespace losc {

enum class ManeuverKind { kBangBang = 0, kWeave = 1, kJink = 2 };

const char* to_string(ManeuverKind k);

struct ManeuverConfig {
  Interval bang_bang_duration{1.0, 8.0};
  Interval initiation_time{0.0, 6.0};
  Interval weave_period{1.0, 8.0};
  Interval jink_interval{0.5, 4.0};
  double p_max_accel = 0.5;
  // Long-period weaves, up to twice the expected time of flight.
  bool long_weave = true;
  double p_long_weave = 0.2;
  // Jink switch times are generated up to this horizon.
  double horizon = 40.0;

  friend bool operator==(const ManeuverConfig&, const ManeuverConfig&) = default;
};

/// Open-loop lateral maneuver of the target. Immutable once sampled.
///
/// `turn_axis` is the fixed axis the target velocity turns about; the lateral
/// direction at any time is turn_axis x v_T_hat, so the maneuver frame is
/// carried along as the velocity rotates.
struct ManeuverSpec {
  ManeuverKind kind = ManeuverKind::kBangBang;
  double accel_level = 0.0;     // m/s^2, before dynamic-pressure scaling
  double start_time = 0.0;      // s
  double duration = 0.0;        // bang-bang: time before the single reversal
  double period = 0.0;          // weave period
  double phase_sign = 1.0;      // +1 or -1
  Vec3 turn_axis = Vec3::UnitZ();
  std::vector<double> switch_times;  // jink: absolute reversal times

  /// Signed scalar schedule in [-accel_level, accel_level].
  double signed_magnitude(double t) const;
};

/// Samples a maneuver. `expected_tof` (range over closing speed at spawn) sets
/// the long-weave upper bound; pass 0 to disable the long-period branch.
ManeuverSpec sample_maneuver(const ManeuverConfig& cfg, double target_max_accel, Rng& rng,
                             double expected_tof = 0.0);

/// Commanded acceleration, orthogonal to the current target velocity.
Vec3 commanded_accel(const ManeuverSpec& spec, double t, const Vec3& target_vel);

}  // namespace losc
