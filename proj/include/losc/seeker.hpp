#pragma once

#include <cmath>

#include "losc/geometry.hpp"
#include "losc/types.hpp"

namespace losc {

struct RadomeParams {
  double a_u = 0.0;  // rad
  double a_v = 0.0;  // rad
  double k_u = 2.0;
  double k_v = 2.0;

  friend bool operator==(const RadomeParams&, const RadomeParams&) = default;
};

/// First-order low-pass filter, exact for inputs held over each update.
/// The first sample initializes the state (no start-up transient).
template <typename T>
class LagFilter {
 public:
  explicit LagFilter(double tau) : tau_(tau) {
    if (!(tau > 0.0)) throw Error(ErrorCode::kInvalidArgument, "lag time constant must be > 0");
  }

  const T& update(const T& input, double dt) {
    if (!initialized_) {
      state_ = input;
      initialized_ = true;
    } else {
      state_ = state_ + (1.0 - std::exp(-dt / tau_)) * (input - state_);
    }
    return state_;
  }

  void reset() { initialized_ = false; }
  void reset(const T& value) {
    state_ = value;
    initialized_ = true;
  }
  bool initialized() const { return initialized_; }
  const T& state() const { return state_; }
  double tau() const { return tau_; }

 private:
  double tau_;
  T state_{};
  bool initialized_ = false;
};

struct RefractionAngles {
  double u = 0.0;
  double v = 0.0;
};

/// Azimuth/elevation refraction errors as a function of look angle.
RefractionAngles refraction_angles(double look, const RadomeParams& p);

/// Analytic d(theta_u)/d(look) of the refraction model.
double refraction_slope_u(double look, const RadomeParams& p);

/// Refracted and noise-rotated LOS before the lag filter:
/// C(q_N) C(q_R) lambda with q_R = (theta_u, theta_v, 0).
Vec3 distorted_los(const Vec3& los, const Vec3& missile_dir, const RadomeParams& p,
                   const Euler321& noise);

/// Draws the per-update noise rotation, each angle ~ N(0, sigma).
Euler321 sample_los_noise(double sigma, Rng& rng);

struct SeekerOutput {
  Vec3 los = Vec3::UnitX();       // apparent LOS unit vector
  Vec3 los_rate = Vec3::Zero();   // rad/s
  double closing_velocity = 0.0;  // m/s
  double range = 0.0;             // m
  Vec3 rel_vel = Vec3::Zero();    // ground truth, passed through
};

/// Apparent LOS: lagged componentwise, then renormalized.
class Seeker {
 public:
  Seeker(const RadomeParams& radome, double sigma_los, double lag_tau)
      : radome_(radome), sigma_(sigma_los), lag_(lag_tau) {}

  Vec3 apparent_los(const Vec3& los, const Vec3& missile_dir, double dt, Rng& rng);

  void reset() { lag_.reset(); }
  const RadomeParams& radome() const { return radome_; }

 private:
  RadomeParams radome_;
  double sigma_;
  LagFilter<Vec3> lag_;
};

/// Navigation outputs built from the apparent LOS and ground-truth range and
/// relative velocity.
SeekerOutput nav_outputs(const Vec3& apparent_los, const Vec3& r_tm, const Vec3& v_tm);

/// LOS rotation rate (r x v) / (r . r) for r = los * range.
Vec3 los_rotation_rate(const Vec3& los, double range, const Vec3& v_tm);

}  // namespace losc
