#include "uavtrack/sim.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace uavtrack::sim {

namespace {

Vec2 unit(double angle) { return {std::cos(angle), std::sin(angle)}; }

/// Analytic vehicle state at time t (seconds from scenario start).
struct TrajSample {
  Vec2 pos, vel, acc;
  double yaw, yaw_rate, cog, sideslip;
};

/// C2 ramp 0 -> 1 on [0, 1].
double smooth_ramp(double tau) {
  tau = std::clamp(tau, 0.0, 1.0);
  return tau - std::sin(2.0 * kPi * tau) / (2.0 * kPi);
}
double smooth_ramp_d1(double tau) {
  if (tau <= 0.0 || tau >= 1.0) return 0.0;
  return 1.0 - std::cos(2.0 * kPi * tau);
}
double smooth_ramp_d2(double tau) {
  if (tau <= 0.0 || tau >= 1.0) return 0.0;
  return 2.0 * kPi * std::sin(2.0 * kPi * tau);
}

/// Drift maneuver sideslip profile: rest, ramp up, plateau, ramp down.
void sideslip_profile(const Scenario& scn, double t, double& beta,
                      double& beta_dot) {
  const double t1 = 0.20 * scn.duration, t2 = 0.40 * scn.duration;
  const double t3 = 0.75 * scn.duration, t4 = 0.95 * scn.duration;
  beta = 0.0;
  beta_dot = 0.0;
  if (t <= t1 || t >= t4) return;
  if (t < t2) {
    const double tau = (t - t1) / (t2 - t1);
    beta = scn.sideslip_peak * 0.5 * (1.0 - std::cos(kPi * tau));
    beta_dot = scn.sideslip_peak * 0.5 * kPi * std::sin(kPi * tau) / (t2 - t1);
  } else if (t <= t3) {
    beta = scn.sideslip_peak;
  } else {
    const double tau = (t - t3) / (t4 - t3);
    beta = scn.sideslip_peak * 0.5 * (1.0 + std::cos(kPi * tau));
    beta_dot =
        -scn.sideslip_peak * 0.5 * kPi * std::sin(kPi * tau) / (t4 - t3);
  }
}

TrajSample sample_trajectory(const Scenario& scn, double t) {
  TrajSample s{};
  switch (scn.maneuver) {
    case Maneuver::kStraight: {
      const Vec2 u = unit(scn.heading);
      s.pos = scn.start + scn.speed * t * u;
      s.vel = scn.speed * u;
      s.acc = Vec2::Zero();
      s.cog = scn.heading;
      s.yaw = scn.heading;
      s.yaw_rate = 0.0;
      s.sideslip = 0.0;
      break;
    }
    case Maneuver::kCircle:
    case Maneuver::kDrift: {
      const double omega = scn.speed / scn.radius;
      const Vec2 center = scn.start + scn.radius * unit(scn.heading + kPi / 2);
      const double phi = scn.heading - kPi / 2 + omega * t;
      s.pos = center + scn.radius * unit(phi);
      s.vel = scn.speed * unit(phi + kPi / 2);
      s.acc = -scn.radius * omega * omega * unit(phi);
      s.cog = wrap_angle(phi + kPi / 2);
      double beta = 0.0, beta_dot = 0.0;
      if (scn.maneuver == Maneuver::kDrift)
        sideslip_profile(scn, t, beta, beta_dot);
      s.yaw = wrap_angle(s.cog - beta);
      s.yaw_rate = omega - beta_dot;
      s.sideslip = beta;
      break;
    }
    case Maneuver::kLaneChange: {
      const double t1 = 0.25 * scn.duration, t2 = 0.75 * scn.duration;
      const double tau = (t - t1) / (t2 - t1);
      const double lat = scn.lane_offset * smooth_ramp(tau);
      const double lat_d1 = scn.lane_offset * smooth_ramp_d1(tau) / (t2 - t1);
      const double lat_d2 =
          scn.lane_offset * smooth_ramp_d2(tau) / ((t2 - t1) * (t2 - t1));
      const Mat2 r = rotation2(scn.heading);
      s.pos = scn.start + r * Vec2(scn.speed * t, lat);
      s.vel = r * Vec2(scn.speed, lat_d1);
      s.acc = r * Vec2(0.0, lat_d2);
      s.cog = std::atan2(s.vel.y(), s.vel.x());
      s.yaw = s.cog;
      const double v2 = s.vel.squaredNorm();
      s.yaw_rate =
          (s.vel.x() * s.acc.y() - s.vel.y() * s.acc.x()) / v2;
      s.sideslip = 0.0;
      break;
    }
  }
  return s;
}

std::array<Vec2, 4> footprint_corners(const Vec2& pos, double yaw,
                                      const measure::VehicleDims& dims) {
  const Mat2 r = rotation2(yaw);
  const double hl = 0.5 * dims.length, hw = 0.5 * dims.width;
  return {pos + r * Vec2(hl, hw), pos + r * Vec2(hl, -hw),
          pos + r * Vec2(-hl, -hw), pos + r * Vec2(-hl, hw)};
}

void validate(const Scenario& scn) {
  if (!(scn.duration > 0.0 && scn.fps > 0.0))
    throw InvalidScenario("duration and fps must be positive");
  if (!(scn.speed > 0.0)) throw InvalidScenario("speed must be positive");
  if ((scn.maneuver == Maneuver::kCircle ||
       scn.maneuver == Maneuver::kDrift) &&
      !(scn.radius > 0.0))
    throw InvalidScenario("circle/drift maneuvers need a positive radius");
  if (!(scn.camera.alpha > 0.0 && scn.camera.hover_altitude > 0.0 &&
        scn.camera.resolution.x() > 0 && scn.camera.resolution.y() > 0))
    throw InvalidScenario("camera geometry must be positive");
  if (!(scn.vehicle.width > 0.0 && scn.vehicle.width < scn.vehicle.length))
    throw InvalidScenario("vehicle dims must satisfy 0 < width < length");
  if (scn.roof_height >= scn.camera.hover_altitude)
    throw InvalidScenario("vehicle roof reaches the hover altitude");
  if (!(scn.reference_rate > 0.0))
    throw InvalidScenario("reference rate must be positive");
  if (scn.n_gcps < 2 || scn.n_gcps > 8)
    throw InvalidScenario("GCP count must be in [2, 8]");
  if (scn.noise.outlier_rate < 0.0 || scn.noise.outlier_rate > 0.9)
    throw InvalidScenario("outlier rate must be in [0, 0.9]");
}

std::vector<Vec2> gcp_pixels(const Scenario& scn) {
  const double rx = scn.camera.resolution.x();
  const double ry = scn.camera.resolution.y();
  const std::array<Vec2, 8> layout = {
      Vec2(0.08, 0.08), Vec2(0.92, 0.08), Vec2(0.92, 0.92), Vec2(0.08, 0.92),
      Vec2(0.50, 0.06), Vec2(0.94, 0.50), Vec2(0.50, 0.94), Vec2(0.06, 0.50)};
  std::vector<Vec2> out;
  for (int i = 0; i < scn.n_gcps; ++i)
    out.emplace_back(layout[i].x() * rx, layout[i].y() * ry);
  return out;
}

}  // namespace

std::string to_string(Maneuver m) {
  switch (m) {
    case Maneuver::kStraight: return "straight";
    case Maneuver::kCircle: return "circle";
    case Maneuver::kLaneChange: return "lane_change";
    case Maneuver::kDrift: return "drift";
  }
  return "straight";
}

Maneuver maneuver_from_string(const std::string& name) {
  if (name == "straight") return Maneuver::kStraight;
  if (name == "circle") return Maneuver::kCircle;
  if (name == "lane_change") return Maneuver::kLaneChange;
  if (name == "drift") return Maneuver::kDrift;
  throw InvalidScenario("unknown maneuver '" + name + "'");
}

Vec2 project_elevated(const Vec2& footprint_px, double h,
                      const measure::CameraGeometry& cam) {
  if (h >= cam.hover_altitude)
    throw InvalidScenario("projected point reaches the hover altitude");
  const Vec2 seen = footprint_px - cam.principal_point();
  return cam.principal_point() + seen / (1.0 - h / cam.hover_altitude);
}

Scenario default_scenario() {
  Scenario scn;
  scn.camera.alpha = 0.0334;
  scn.camera.hover_altitude = 50.0;
  georef::FrameMapping m;
  m.alpha = scn.camera.alpha;
  m.theta_offset = scn.mapping_theta;
  m.linear_offset = scn.mapping_offset;
  // Straight pass across the image, entering near the left edge.
  scn.start = georef::map_pixel(m, Vec2(160.0, 540.0));
  const Vec2 dir = georef::map_pixel(m, Vec2(161.0, 540.0)) -
                   georef::map_pixel(m, Vec2(160.0, 540.0));
  scn.heading = std::atan2(dir.y(), dir.x());
  scn.speed = 8.0;
  scn.duration = 6.0;
  scn.fps = 25.0;
  return scn;
}

std::vector<Vec2> convex_hull(std::vector<Vec2> pts) {
  std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const Vec2& a, const Vec2& b) {
                          return a.x() == b.x() && a.y() == b.y();
                        }),
            pts.end());
  if (pts.size() < 3) return pts;

  const auto cross = [](const Vec2& o, const Vec2& a, const Vec2& b) {
    return (a.x() - o.x()) * (b.y() - o.y()) -
           (a.y() - o.y()) * (b.x() - o.x());
  };
  std::vector<Vec2> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {  // lower
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0.0) --k;
    hull[k++] = p;
  }
  const std::size_t lower = k + 1;
  for (auto it = pts.rbegin() + 1; it != pts.rend(); ++it) {  // upper
    while (k >= lower && cross(hull[k - 2], hull[k - 1], *it) <= 0.0) --k;
    hull[k++] = *it;
  }
  hull.resize(k - 1);
  return hull;
}

std::array<Vec2, 4> min_area_rect(std::span<const Vec2> pts) {
  std::vector<Vec2> hull = convex_hull({pts.begin(), pts.end()});
  if (hull.size() < 3)
    throw Error("min_area_rect needs at least 3 non-collinear points");

  double best_area = std::numeric_limits<double>::infinity();
  std::array<Vec2, 4> best{};
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const Vec2 edge = hull[(i + 1) % hull.size()] - hull[i];
    const double angle = std::atan2(edge.y(), edge.x());
    const Mat2 r = rotation2(-angle);
    double min_x = std::numeric_limits<double>::infinity(), max_x = -min_x;
    double min_y = min_x, max_y = -min_x;
    for (const auto& p : hull) {
      const Vec2 q = r * p;
      min_x = std::min(min_x, q.x());
      max_x = std::max(max_x, q.x());
      min_y = std::min(min_y, q.y());
      max_y = std::max(max_y, q.y());
    }
    const double area = (max_x - min_x) * (max_y - min_y);
    if (area < best_area) {
      best_area = area;
      const Mat2 back = rotation2(angle);
      best = {back * Vec2(min_x, min_y), back * Vec2(max_x, min_y),
              back * Vec2(max_x, max_y), back * Vec2(min_x, max_y)};
    }
  }
  return best;
}

SimOutput generate(const Scenario& scn) {
  validate(scn);
  std::mt19937_64 rng(scn.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> uni(0.0, 1.0);

  SimOutput out;
  georef::FrameMapping& mapping = out.truth.mapping;
  mapping.alpha = scn.camera.alpha;
  mapping.theta_offset = scn.mapping_theta;
  mapping.linear_offset = scn.mapping_offset;

  const double rx = scn.camera.resolution.x();
  const double ry = scn.camera.resolution.y();
  const Vec2 img_center(0.5 * rx, 0.5 * ry);
  const long n_frames = static_cast<long>(scn.duration * scn.fps + 1e-9) + 1;

  // Ground control points: true layout plus the emitted ambiguous pixels.
  for (const auto& px : gcp_pixels(scn)) {
    georef::GroundControlPoint g;
    g.id = "g" + std::to_string(out.gcps_true.size() + 1);
    g.pcf = px;
    g.ltp = georef::map_pixel(mapping, px);
    out.gcps_true.push_back(g);
    const double amb = scn.noise.gcp_ambiguity_px;
    g.pcf += Vec2(amb * (2.0 * uni(rng) - 1.0), amb * (2.0 * uni(rng) - 1.0));
    out.gcps.push_back(g);
  }

  // Static scene points for the registration correspondences.
  std::vector<Vec2> scene_pts;
  scene_pts.reserve(scn.n_matches);
  for (int i = 0; i < scn.n_matches; ++i)
    scene_pts.emplace_back((0.03 + 0.94 * uni(rng)) * rx,
                           (0.03 + 0.94 * uni(rng)) * ry);

  // Hover-drift random walk about the image center (identity at frame 0).
  double walk_log_scale = 0.0, walk_rot = 0.0;
  Vec2 walk_trans = Vec2::Zero();
  out.truth.drift.reserve(n_frames);
  for (long k = 0; k < n_frames; ++k) {
    if (k > 0) {
      walk_log_scale += scn.drift_walk.scale_std * gauss(rng);
      walk_rot += scn.drift_walk.rot_std * gauss(rng);
      walk_trans += Vec2(scn.drift_walk.trans_std * gauss(rng),
                         scn.drift_walk.trans_std * gauss(rng));
    }
    stabilize::SimilarityTransform d;
    d.scale = std::exp(walk_log_scale);
    d.rotation = walk_rot;
    d.translation =
        img_center + walk_trans - d.scale * (rotation2(d.rotation) * img_center);
    out.truth.drift.push_back(d);
  }

  out.truth.frames.reserve(n_frames);
  out.detections.reserve(n_frames);
  out.matches.reserve(n_frames);
  for (long k = 0; k < n_frames; ++k) {
    const double t_rel = static_cast<double>(k) / scn.fps;
    const TrajSample traj = sample_trajectory(scn, t_rel);

    FramePose pose;
    pose.t = scn.utc_start + t_rel;
    pose.pos = traj.pos;
    pose.vel = traj.vel;
    pose.acc = traj.acc;
    pose.yaw = traj.yaw;
    pose.yaw_rate = traj.yaw_rate;
    pose.cog = traj.cog;
    pose.sideslip = traj.sideslip;
    pose.footprint_ltp = footprint_corners(traj.pos, traj.yaw, scn.vehicle);
    out.truth.frames.push_back(pose);

    // Chassis box: bottom ring at the clearance height, top ring at the
    // roof, both projected with the exact pinhole relief displacement.
    std::vector<Vec2> projected;
    projected.reserve(8);
    for (const auto& corner_ltp : pose.footprint_ltp) {
      const Vec2 px = georef::pixel_for_ltp(mapping, corner_ltp);
      projected.push_back(
          project_elevated(px, scn.vehicle.clearance, scn.camera));
      projected.push_back(project_elevated(px, scn.roof_height, scn.camera));
    }
    for (const auto& p : projected) {
      if (p.x() < 3.0 || p.x() > rx - 4.0 || p.y() < 3.0 || p.y() > ry - 4.0)
        throw InvalidScenario("vehicle leaves the image at frame " +
                              std::to_string(k));
    }

    measure::RotatedBBox box;
    const auto rect = min_area_rect(projected);
    const auto& drift = out.truth.drift[k];
    for (int c = 0; c < 4; ++c) {
      Vec2 p = drift.apply(rect[c]);
      p += Vec2(scn.noise.corner_std_px * gauss(rng),
                scn.noise.corner_std_px * gauss(rng));
      if (scn.noise.quantize) p = {std::round(p.x()), std::round(p.y())};
      box.corners[c] = p;
    }
    out.detections.emplace_back(k, box);

    FrameMatches fm;
    fm.frame = k;
    fm.corrs.reserve(scene_pts.size());
    for (const auto& ref : scene_pts) {
      stabilize::Correspondence c;
      c.ref_pt = ref;
      if (uni(rng) < scn.noise.outlier_rate) {
        c.cur_pt = {uni(rng) * rx, uni(rng) * ry};
      } else {
        c.cur_pt = drift.apply(ref) +
                   Vec2(scn.noise.match_std_px * gauss(rng),
                        scn.noise.match_std_px * gauss(rng));
      }
      fm.corrs.push_back(c);
    }
    out.matches.push_back(std::move(fm));
  }

  // One LED event per whole UTC second: first frame at or after the pulse.
  const double t_end = scn.utc_start + (n_frames - 1) / scn.fps;
  for (long s = static_cast<long>(std::ceil(scn.utc_start));; ++s) {
    if (static_cast<double>(s) > t_end) break;
    const long frame = static_cast<long>(
        std::ceil((static_cast<double>(s) - scn.utc_start) * scn.fps - 1e-9));
    if (frame >= n_frames) break;
    out.led_events.push_back({frame, s});
  }

  // Reference trace straight from the analytic trajectory.
  const long n_ref =
      static_cast<long>(scn.duration * scn.reference_rate + 1e-9) + 1;
  out.reference.reserve(n_ref);
  for (long i = 0; i < n_ref; ++i) {
    const double t_rel = static_cast<double>(i) / scn.reference_rate;
    const TrajSample s = sample_trajectory(scn, t_rel);
    bench::ReferenceSample r;
    r.t = scn.utc_start + t_rel;
    r.pos = s.pos;
    r.v_over_ground = s.vel.norm();
    r.a_over_ground = s.acc.norm();
    r.yaw = s.yaw;
    r.sideslip = s.sideslip;
    r.cog = s.cog;
    out.reference.push_back(r);
  }
  return out;
}

BudgetReport validate_budget(const Scenario& scn, int n_trials) {
  BudgetReport report;
  const double eta_tau = 1.0 / scn.fps;

  for (int trial = 0; trial < n_trials; ++trial) {
    Scenario s = scn;
    s.seed = scn.seed + 0x9e3779b9ull * static_cast<std::uint64_t>(trial);
    const SimOutput out = generate(s);
    const auto& mapping = out.truth.mapping;

    // --- Mapping stage: fit from the ambiguous GCPs, compare against the
    // true transform and the closed-form budget.
    std::size_t ia = 0, ib = 1;
    double widest = -1.0;
    for (std::size_t i = 0; i < out.gcps.size(); ++i)
      for (std::size_t j = i + 1; j < out.gcps.size(); ++j) {
        const double sep = (out.gcps[j].pcf - out.gcps[i].pcf).norm();
        if (sep > widest) {
          widest = sep;
          ia = i;
          ib = j;
        }
      }
    const auto fitted = georef::fit_pair(out.gcps[ia], out.gcps[ib]);
    const double d_seen = (out.gcps[ib].pcf - out.gcps[ia].pcf).norm();
    const double d_true =
        (out.gcps_true[ib].pcf - out.gcps_true[ia].pcf).norm();
    const double zeta = s.noise.gcp_ambiguity_px;

    auto check = [](BudgetReport::Stage& stage, double measured,
                    double bound) {
      ++stage.checks;
      if (measured > bound + 1e-12) {
        ++stage.violations;
        stage.worst_excess = std::max(stage.worst_excess, measured - bound);
      }
    };

    if (zeta > 0.0) {
      georef::MappingErrorBudget budget = georef::error_budget(
          out.gcps[ia], out.gcps[ib], mapping.alpha, zeta);
      budget.pair_distance_px = std::min(d_seen, d_true);
      budget.eta_alpha =
          georef::similarity_fraction(budget.pair_distance_px, zeta);

      const double sim_meas =
          std::min(fitted.alpha, mapping.alpha) /
          std::max(fitted.alpha, mapping.alpha);
      check(report.mapping, budget.eta_alpha - sim_meas, 0.0);

      const double theta_err =
          angular_distance(fitted.theta_offset, mapping.theta_offset);
      check(report.mapping, theta_err, budget.eta_theta);

      const double rxp = s.camera.resolution.x();
      const double ryp = s.camera.resolution.y();
      const Vec2 probes[5] = {Vec2(0, 0), Vec2(rxp, 0), Vec2(0, ryp),
                              Vec2(rxp, ryp), Vec2(0.5 * rxp, 0.5 * ryp)};
      for (const auto& p : probes) {
        const double measured =
            (georef::map_pixel(fitted, p) - georef::map_pixel(mapping, p))
                .norm();
        check(report.mapping, measured, budget.point_bound_total(p));
      }
    } else {
      // No ambiguity: the fit must reproduce the true mapping exactly.
      check(report.mapping,
            std::abs(fitted.alpha - mapping.alpha) +
                angular_distance(fitted.theta_offset, mapping.theta_offset) +
                (fitted.linear_offset - mapping.linear_offset).norm(),
            1e-9);
    }

    // --- Bounding-box stage: relief-corrected anchor against its bound.
    const double box_bound =
        measure::corner_error_bound(s.vehicle.clearance, s.camera);
    for (std::size_t k = 0; k < out.detections.size(); ++k) {
      const auto& [frame, det] = out.detections[k];
      // Undo the known drift to isolate the detection/relief error.
      const auto undrift = out.truth.drift[k].inverse();
      int anchor = 0;
      double best = std::numeric_limits<double>::infinity();
      std::array<Vec2, 4> ref_px;
      for (int c = 0; c < 4; ++c) {
        ref_px[c] = undrift.apply(det.corners[c]);
        const double dist = (ref_px[c] - s.camera.principal_point()).norm();
        if (dist < best) {
          best = dist;
          anchor = c;
        }
      }
      const Vec2 corrected =
          measure::relief_shift(ref_px[anchor], s.vehicle.clearance, s.camera);
      const Vec2 corrected_ltp = georef::map_pixel(mapping, corrected);
      double err = std::numeric_limits<double>::infinity();
      for (const auto& truth_corner : out.truth.frames[k].footprint_ltp)
        err = std::min(err, (corrected_ltp - truth_corner).norm());
      check(report.box, err, box_bound);
    }

    // --- Timing stage: fitted timebase against the true frame clock.
    const auto tb = sync::fit_timebase(out.led_events, s.fps);
    for (long k = 0; k < static_cast<long>(out.truth.frames.size()); ++k) {
      const double measured = std::abs(
          sync::frame_to_utc(tb, static_cast<double>(k)) -
          out.truth.frames[k].t);
      check(report.timing, measured, eta_tau);
    }
  }
  return report;
}

}  // namespace uavtrack::sim
