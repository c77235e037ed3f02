#include "uavtrack/sync.hpp"

#include <cmath>
#include <string>

namespace uavtrack::sync {

TimeBase fit_timebase(const std::vector<LedEvent>& events,
                      double fps_nominal) {
  if (!(fps_nominal > 0.0))
    throw NonPositiveFps("nominal fps must be > 0");
  if (events.size() < 2)
    throw InsufficientEvents("timebase fit needs >= 2 LED events, got " +
                             std::to_string(events.size()));

  double sf = 0.0, st = 0.0, sff = 0.0, sft = 0.0;
  for (const auto& e : events) {
    const double f = static_cast<double>(e.frame);
    const double t = static_cast<double>(e.utc_second);
    sf += f;
    st += t;
    sff += f * f;
    sft += f * t;
  }
  const double n = static_cast<double>(events.size());
  const double det = n * sff - sf * sf;
  if (std::abs(det) < 1e-9)
    throw InsufficientEvents("LED events share one frame index");

  TimeBase tb;
  tb.fps_nominal = fps_nominal;
  tb.slope = (n * sft - sf * st) / det;
  tb.offset = (st - tb.slope * sf) / n;

  const double frame_period = 1.0 / fps_nominal;
  if (std::abs(tb.slope - frame_period) > 0.05 * frame_period)
    throw ResidualTooLarge("fitted slope " + std::to_string(tb.slope) +
                           " s/frame is implausible for " +
                           std::to_string(fps_nominal) +
                           " fps; check the LED detections");

  tb.residual_max = 0.0;
  for (const auto& e : events) {
    const double r = std::abs(frame_to_utc(tb, static_cast<double>(e.frame)) -
                              static_cast<double>(e.utc_second));
    tb.residual_max = std::max(tb.residual_max, r);
  }
  if (tb.residual_max > frame_period)
    throw ResidualTooLarge("timebase residual " +
                           std::to_string(tb.residual_max) +
                           " s exceeds one frame period; check the LED "
                           "detections");
  return tb;
}

double frame_to_utc(const TimeBase& tb, double frame) {
  return tb.offset + tb.slope * frame;
}

SyncErrorBounds sync_error_bounds(double fps, double speed, double accel) {
  if (!(fps > 0.0)) throw NonPositiveFps("fps must be > 0");
  SyncErrorBounds b;
  b.eta_tau = 1.0 / fps;
  b.eta_pos = speed * b.eta_tau;
  b.eta_vel = accel * b.eta_tau;
  return b;
}

}  // namespace uavtrack::sync
