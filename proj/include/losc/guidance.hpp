#pragma once

#include <string>

#include "losc/geometry.hpp"
#include "losc/seeker.hpp"
#include "losc/types.hpp"

namespace losc {

enum class GuidanceLaw { kPn, kApn, kPnLosc };
enum class PerpFrame { kRelative, kMissile };

const char* to_string(GuidanceLaw law);
GuidanceLaw parse_law(const std::string& name);
const char* to_string(PerpFrame f);
PerpFrame parse_perp_frame(const std::string& name);

struct GuidanceConfig {
  GuidanceLaw law = GuidanceLaw::kPnLosc;
  double nav_constant = 3.0;
  double curvature_scale = deg_to_rad(2.0);    // rad per unit action
  double accel_ref = 74.0 * kGravity;          // sea level, 1000 m/s
  double accel_max = 40.0 * kGravity;          // load limit
  double fcs_tau = 0.08;
  double actuator_tau = 0.02;
  PerpFrame perp_frame = PerpFrame::kRelative;

  /// PN and APN run the same pipeline with zero curvature.
  double effective_curvature() const {
    return law == GuidanceLaw::kPnLosc ? curvature_scale : 0.0;
  }

  friend bool operator==(const GuidanceConfig&, const GuidanceConfig&) = default;
};

struct CurvedLos {
  Vec3 los = Vec3::UnitX();
  Vec3 rate = Vec3::Zero();
  Euler321 theta;
};

/// Rotates the apparent LOS by the Euler 3-2-1 attitude k * u and recomputes
/// the LOS rotation rate from the curved LOS.
CurvedLos curve_los(const Vec3& action, const SeekerOutput& seeker, double curvature_scale);

/// True PN with the commanded acceleration projected off the configured axis
/// (relative velocity or missile velocity).
Vec3 tpn_accel(const CurvedLos& c, double closing_velocity, const Vec3& rel_vel,
               const Vec3& missile_dir, const GuidanceConfig& cfg);

/// TPN plus N/2 times the true target acceleration, same projection.
Vec3 apn_accel(const CurvedLos& c, double closing_velocity, const Vec3& rel_vel,
               const Vec3& missile_dir, const Vec3& target_accel, const GuidanceConfig& cfg);

/// Dynamic-pressure acceleration limit rho(h) V^2 / (rho(0) 1000^2) * a_ref.
double dynamic_pressure_limit(double altitude, double speed, double accel_ref);

/// Flight-control and actuator lags with the two magnitude clips between
/// guidance command and achieved missile acceleration. Starts at rest.
class FlightControl {
 public:
  explicit FlightControl(const GuidanceConfig& cfg);

  Vec3 update(const Vec3& commanded, double altitude, double speed, double dt);
  void reset();

 private:
  double accel_ref_;
  double accel_max_;
  LagFilter<double> fcs_lag_;
  LagFilter<Vec3> actuator_lag_;
  Vec3 last_dir_ = Vec3::Zero();
};

}  // namespace losc
