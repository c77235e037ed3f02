#include "uavtrack/filter.hpp"

#include <cmath>

namespace uavtrack::filter {

namespace {

// Initial 1-sigma spread of the unmeasured state components.
constexpr double kInitVelSigma = 10.0;   // m/s
constexpr double kInitAccSigma = 5.0;    // m/s^2
constexpr double kInitYawRateSigma = 1.0;  // rad/s

using Mat38 = Eigen::Matrix<double, 3, 8>;
using Mat3 = Eigen::Matrix3d;
using Vec3 = Eigen::Vector3d;

Mat38 measurement_matrix() {
  Mat38 h = Mat38::Zero();
  h(0, kX) = 1.0;
  h(1, kY) = 1.0;
  h(2, kYaw) = 1.0;
  return h;
}

void symmetrize(Mat8& p) { p = 0.5 * (p + p.transpose()).eval(); }

}  // namespace

Mat8 transition_matrix(double dt) {
  Mat8 f = Mat8::Identity();
  for (int axis = 0; axis < 2; ++axis) {
    f(kX + axis, kVx + axis) = dt;
    f(kX + axis, kAx + axis) = 0.5 * dt * dt;
    f(kVx + axis, kAx + axis) = dt;
  }
  f(kYaw, kYawRate) = dt;
  return f;
}

Mat8 process_noise(double dt, const FilterConfig& cfg) {
  const double d2 = dt * dt;
  const double d3 = d2 * dt;
  const double d4 = d3 * dt;
  const double d5 = d4 * dt;
  Mat8 q = Mat8::Zero();
  for (int axis = 0; axis < 2; ++axis) {
    const int p = kX + axis, v = kVx + axis, a = kAx + axis;
    q(p, p) = d5 / 20.0;
    q(p, v) = q(v, p) = d4 / 8.0;
    q(p, a) = q(a, p) = d3 / 6.0;
    q(v, v) = d3 / 3.0;
    q(v, a) = q(a, v) = d2 / 2.0;
    q(a, a) = dt;
  }
  q.topLeftCorner<6, 6>() *= cfg.q_jerk;
  q(kYaw, kYaw) = cfg.q_yaw_acc * d3 / 3.0;
  q(kYaw, kYawRate) = q(kYawRate, kYaw) = cfg.q_yaw_acc * d2 / 2.0;
  q(kYawRate, kYawRate) = cfg.q_yaw_acc * dt;
  return q;
}

VehicleState predict(const VehicleState& state, double dt,
                     const FilterConfig& cfg) {
  if (!(dt > 0.0))
    throw NonPositiveDt("dt must be > 0, got " + std::to_string(dt));
  const Mat8 f = transition_matrix(dt);
  VehicleState out;
  out.x = f * state.x;
  out.x[kYaw] = wrap_angle(out.x[kYaw]);
  out.cov = f * state.cov * f.transpose() + process_noise(dt, cfg);
  symmetrize(out.cov);
  out.t = state.t + dt;
  return out;
}

VehicleState update(const VehicleState& state, const measure::Measurement& z,
                    const FilterConfig& cfg) {
  if (!z.center.allFinite() || !std::isfinite(z.yaw))
    throw NonFiniteMeasurement("measurement contains non-finite values");

  double measured_yaw = wrap_angle(z.yaw);
  // The box orientation is a direction, not a heading; at valid speeds,
  // choose the hypothesis consistent with the course over ground.
  if (state.speed() > cfg.v_min_cog) {
    const double cog = std::atan2(state.x[kVy], state.x[kVx]);
    if (angular_distance(measured_yaw, cog) > kPi / 2.0)
      measured_yaw = wrap_angle(measured_yaw + kPi);
  }

  const Mat38 h = measurement_matrix();
  const double r_scale = z.quality ? 1.0 : cfg.r_lowq_scale;
  const Mat3 r =
      Vec3(cfg.r_pos, cfg.r_pos, cfg.r_yaw).asDiagonal() * r_scale;

  Vec3 innovation;
  innovation << z.center.x() - state.x[kX], z.center.y() - state.x[kY],
      wrap_angle(measured_yaw - state.x[kYaw]);

  const Mat3 s = h * state.cov * h.transpose() + r;
  const Eigen::Matrix<double, 8, 3> k =
      state.cov * h.transpose() * s.inverse();

  VehicleState out;
  out.t = state.t;
  out.x = state.x + k * innovation;
  out.x[kYaw] = wrap_angle(out.x[kYaw]);
  const Mat8 ikh = Mat8::Identity() - k * h;
  out.cov = ikh * state.cov * ikh.transpose() + k * r * k.transpose();
  symmetrize(out.cov);
  return out;
}

DerivedState derive(const VehicleState& state, const FilterConfig& cfg) {
  DerivedState d;
  d.speed = state.speed();
  d.cog = std::atan2(state.x[kVy], state.x[kVx]);
  d.valid_sideslip = d.speed > cfg.v_min_cog;
  d.sideslip = d.valid_sideslip ? wrap_angle(d.cog - state.x[kYaw]) : 0.0;
  return d;
}

std::vector<TrackPoint> run_track(const std::vector<TimedMeasurement>& track,
                                  const FilterConfig& cfg) {
  if (track.empty()) throw EmptyTrack("no measurements");

  VehicleState state;
  state.t = track.front().t;
  state.x[kX] = track.front().z.center.x();
  state.x[kY] = track.front().z.center.y();
  state.x[kYaw] = wrap_angle(track.front().z.yaw);
  Vec8 diag;
  diag << cfg.r_pos, cfg.r_pos, kInitVelSigma * kInitVelSigma,
      kInitVelSigma * kInitVelSigma, kInitAccSigma * kInitAccSigma,
      kInitAccSigma * kInitAccSigma, cfg.r_yaw,
      kInitYawRateSigma * kInitYawRateSigma;
  state.cov = (cfg.init_cov_scale * diag).asDiagonal();

  std::vector<TrackPoint> out;
  out.push_back({track.front().z.frame, state, derive(state, cfg), true});

  bool heading_resolved = false;
  const auto align_heading = [&](VehicleState& s) {
    if (heading_resolved || s.speed() <= cfg.v_min_cog) return;
    const double cog = std::atan2(s.x[kVy], s.x[kVx]);
    if (angular_distance(s.x[kYaw], cog) > kPi / 2.0)
      s.x[kYaw] = wrap_angle(s.x[kYaw] + kPi);
    heading_resolved = true;
  };

  for (std::size_t i = 1; i < track.size(); ++i) {
    const auto& m = track[i];
    const double dt_total = m.t - track[i - 1].t;
    const long frame_gap = m.z.frame - track[i - 1].z.frame;
    if (dt_total <= 0.0)
      throw NonMonotonicTime("timestamps must increase strictly at frame " +
                             std::to_string(m.z.frame));
    if (frame_gap <= 0)
      throw NonMonotonicTime("frame indices must increase strictly at frame " +
                             std::to_string(m.z.frame));

    const double dt_step = dt_total / static_cast<double>(frame_gap);
    for (long s = 1; s < frame_gap; ++s) {
      state = predict(state, dt_step, cfg);
      out.push_back({track[i - 1].z.frame + s, state, derive(state, cfg),
                     false});
    }
    state = predict(state, dt_step, cfg);
    state = update(state, m.z, cfg);
    align_heading(state);
    out.push_back({m.z.frame, state, derive(state, cfg), true});
  }
  return out;
}

}  // namespace uavtrack::filter
