#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace losc {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kGravity = 9.81;

constexpr double deg_to_rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

enum class ErrorCode {
  kInvalidArgument = 1,
  kInfeasibleLead,
  kStepAfterDone,
  kShapeMismatch,
  kMissingCache,
  kNonFinite,
  kConfig,
  kIo,
  kMissingCheckpoint,
};

/// Exception type used across the library. The C API maps `code()` onto its
/// status enum, so every throw site picks the most specific code it can.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

using Rng = std::mt19937_64;

// Counter-based seed derivation: episode i of stream s is reproducible
// without replaying episodes 0..i-1.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                                    std::uint64_t index) {
  return splitmix64(splitmix64(master ^ splitmix64(stream)) + index);
}

inline double uniform(Rng& rng, double lo, double hi) {
  if (lo == hi) return lo;
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

struct Interval {
  double min = 0.0;
  double max = 0.0;

  bool well_ordered() const { return min <= max; }
  bool contains(double x) const { return x >= min && x <= max; }
  double sample(Rng& rng) const { return uniform(rng, min, max); }

  friend bool operator==(const Interval&, const Interval&) = default;
};

}  // namespace losc
