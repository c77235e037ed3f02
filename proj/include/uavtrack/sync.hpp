#pragma once

#include <vector>

#include "uavtrack/geometry.hpp"

namespace uavtrack::sync {

struct InsufficientEvents : Error {
  using Error::Error;
};
struct ResidualTooLarge : Error {
  using Error::Error;
};
struct NonPositiveFps : Error {
  using Error::Error;
};

/// First video frame on which the PPS-triggered LED is visible, paired
/// with the UTC second it marks.
struct LedEvent {
  long frame = 0;
  long utc_second = 0;  // seconds
};

/// Linear frame-index to UTC-seconds model.
struct TimeBase {
  double slope = 0.0;         // seconds per frame
  double offset = 0.0;        // seconds UTC at frame 0
  double residual_max = 0.0;  // seconds
  double fps_nominal = 0.0;   // frames per second
};

/// Least-squares line through (frame, utc_second). Rejects fits whose
/// residuals exceed one frame period or whose slope is implausible for
/// the nominal frame rate (both signal mis-detected LED frames).
TimeBase fit_timebase(const std::vector<LedEvent>& events, double fps_nominal);

double frame_to_utc(const TimeBase& tb, double frame);

struct SyncErrorBounds {
  double eta_tau = 0.0;  // seconds
  double eta_pos = 0.0;  // meters
  double eta_vel = 0.0;  // m/s
};

/// eta_tau = 1/fps; eta_pos = speed * eta_tau; eta_vel = accel * eta_tau.
SyncErrorBounds sync_error_bounds(double fps, double speed, double accel);

}  // namespace uavtrack::sync
