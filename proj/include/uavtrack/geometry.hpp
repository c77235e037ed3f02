#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>

namespace uavtrack {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

inline constexpr double kPi = std::numbers::pi;

constexpr double deg2rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad2deg(double rad) { return rad * 180.0 / kPi; }

/// Wraps an angle to (-pi, pi].
inline double wrap_angle(double a) {
  a = std::remainder(a, 2.0 * kPi);
  if (a <= -kPi) a += 2.0 * kPi;
  return a;
}

/// Shortest-arc distance between two angles, in [0, pi].
inline double angular_distance(double a, double b) {
  return std::abs(wrap_angle(a - b));
}

/// Counter-clockwise rotation matrix.
inline Mat2 rotation2(double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  Mat2 r;
  r << c, -s, s, c;
  return r;
}

/// Mean direction of a set of angles via the summed unit vectors.
inline double circular_mean(std::span<const double> angles) {
  if (angles.empty()) throw std::invalid_argument("circular_mean: empty input");
  double sx = 0.0, sy = 0.0;
  for (double a : angles) {
    sx += std::cos(a);
    sy += std::sin(a);
  }
  return std::atan2(sy, sx);
}

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace uavtrack
