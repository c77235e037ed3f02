#pragma once

#include <vector>

#include "uavtrack/geometry.hpp"
#include "uavtrack/measure.hpp"

namespace uavtrack::filter {

struct NonPositiveDt : Error {
  using Error::Error;
};
struct NonFiniteMeasurement : Error {
  using Error::Error;
};
struct EmptyTrack : Error {
  using Error::Error;
};
struct NonMonotonicTime : Error {
  using Error::Error;
};

using Vec8 = Eigen::Matrix<double, 8, 1>;
using Mat8 = Eigen::Matrix<double, 8, 8>;

/// State component indices: [x y vx vy ax ay yaw yaw_rate].
enum StateIndex : int { kX = 0, kY, kVx, kVy, kAx, kAy, kYaw, kYawRate };

struct FilterConfig {
  double q_jerk = 5.0;      // (m/s^3)^2, white-jerk spectral density
  double q_yaw_acc = 1.0;   // (rad/s^2)^2
  double r_pos = 0.0334 * 0.0334;            // m^2, (zeta * alpha)^2
  double r_yaw = deg2rad(2.0) * deg2rad(2.0);  // rad^2
  double v_min_cog = 0.5;   // m/s, course-over-ground validity gate
  double init_cov_scale = 1.0;
  double r_lowq_scale = 10.0;  // R inflation for quality-flagged inputs
};

struct VehicleState {
  Vec8 x = Vec8::Zero();
  Mat8 cov = Mat8::Identity();
  double t = 0.0;  // seconds UTC

  Vec2 position() const { return {x[kX], x[kY]}; }
  Vec2 velocity() const { return {x[kVx], x[kVy]}; }
  Vec2 acceleration() const { return {x[kAx], x[kAy]}; }
  double yaw() const { return x[kYaw]; }
  double yaw_rate() const { return x[kYawRate]; }
  double speed() const { return velocity().norm(); }
};

struct DerivedState {
  double cog = 0.0;       // radians
  double sideslip = 0.0;  // radians; 0 when invalid
  double speed = 0.0;     // m/s
  bool valid_sideslip = false;
};

/// Constant-acceleration / constant-yaw-rate transition matrix.
Mat8 transition_matrix(double dt);

/// Exact discretization of the white-jerk + white-yaw-acceleration
/// process noise over dt.
Mat8 process_noise(double dt, const FilterConfig& cfg);

VehicleState predict(const VehicleState& state, double dt,
                     const FilterConfig& cfg);

/// Measurement update on (x, y, yaw) in Joseph form. The yaw innovation is
/// wrapped, and the measured direction is flipped by pi when it opposes
/// the course over ground at valid speeds.
VehicleState update(const VehicleState& state, const measure::Measurement& z,
                    const FilterConfig& cfg);

DerivedState derive(const VehicleState& state, const FilterConfig& cfg);

struct TimedMeasurement {
  double t = 0.0;  // seconds UTC
  measure::Measurement z;
};

struct TrackPoint {
  long frame = 0;
  VehicleState state;
  DerivedState derived;
  bool measured = false;  // false for predict-only gap frames
};

/// Runs the filter over a time-ordered single-vehicle track; frame gaps
/// produce predict-only outputs so the result covers every frame index.
std::vector<TrackPoint> run_track(const std::vector<TimedMeasurement>& track,
                                  const FilterConfig& cfg);

}  // namespace uavtrack::filter
