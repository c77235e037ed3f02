#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "uavtrack/bench.hpp"
#include "uavtrack/geometry.hpp"
#include "uavtrack/georef.hpp"
#include "uavtrack/measure.hpp"
#include "uavtrack/stabilize.hpp"
#include "uavtrack/sync.hpp"

namespace uavtrack::sim {

struct InvalidScenario : Error {
  using Error::Error;
};

enum class Maneuver { kStraight, kCircle, kLaneChange, kDrift };

std::string to_string(Maneuver m);
Maneuver maneuver_from_string(const std::string& name);

/// Per-frame hover-drift random walk (applied as a similarity transform).
struct DriftWalk {
  double scale_std = 0.0;  // log-scale increment std dev
  double rot_std = 0.0;    // radians per frame
  double trans_std = 0.0;  // pixels per frame
};

struct NoiseModel {
  double corner_std_px = 0.0;    // Gaussian noise on detection corners
  bool quantize = true;          // round detection corners to integer px
  double match_std_px = 0.5;     // Gaussian noise on correspondences
  double outlier_rate = 0.0;     // fraction of uniform-random matches
  double gcp_ambiguity_px = 1.0; // uniform +- bound on GCP pixels
};

struct Scenario {
  Maneuver maneuver = Maneuver::kStraight;
  double duration = 6.0;  // seconds
  double fps = 25.0;
  double speed = 8.0;          // m/s
  double radius = 40.0;        // meters (circle, drift)
  double lane_offset = 3.0;    // meters (lane change)
  double heading = 0.0;        // radians, initial course
  Vec2 start = Vec2::Zero();   // meters, ground plane
  double sideslip_peak = deg2rad(27.69);  // radians (drift)

  measure::CameraGeometry camera{};
  measure::VehicleDims vehicle{};
  double roof_height = 1.45;  // meters

  // True pixel-to-ground mapping used for projection.
  double mapping_theta = deg2rad(2.0);       // radians
  Vec2 mapping_offset = Vec2(3.0, -7.0);     // meters

  DriftWalk drift_walk{};
  NoiseModel noise{};

  double utc_start = 1000.37;  // seconds UTC of frame 0
  int n_matches = 120;
  int n_gcps = 4;
  double reference_rate = 100.0;  // reference samples per second
  std::uint64_t seed = 1;
};

/// Scenario whose trajectory is centered in the default camera footprint.
Scenario default_scenario();

/// Analytic vehicle state at one frame plus the true footprint.
struct FramePose {
  double t = 0.0;  // seconds UTC
  Vec2 pos = Vec2::Zero();
  Vec2 vel = Vec2::Zero();
  Vec2 acc = Vec2::Zero();
  double yaw = 0.0;
  double yaw_rate = 0.0;
  double cog = 0.0;
  double sideslip = 0.0;
  std::array<Vec2, 4> footprint_ltp{};  // meters, ground plane
};

struct GroundTruth {
  std::vector<FramePose> frames;
  georef::FrameMapping mapping;  // true pixel-to-ground mapping
  /// Reference-to-current drift per frame (identity at frame 0).
  std::vector<stabilize::SimilarityTransform> drift;
};

struct FrameMatches {
  long frame = 0;
  std::vector<stabilize::Correspondence> corrs;
};

struct SimOutput {
  GroundTruth truth;
  std::vector<std::pair<long, measure::RotatedBBox>> detections;  // current-frame px
  std::vector<georef::GroundControlPoint> gcps;       // ambiguity applied
  std::vector<georef::GroundControlPoint> gcps_true;  // oracle
  std::vector<FrameMatches> matches;
  std::vector<sync::LedEvent> led_events;
  std::vector<bench::ReferenceSample> reference;
};

/// Projects the scenario through the nadir camera with relief
/// displacement, hover drift, pixel quantization and noise. Deterministic
/// for a fixed seed.
SimOutput generate(const Scenario& scn);

/// Exact nadir-pinhole projection of a ground-footprint pixel raised to
/// height h: the seen position moves away from the principal point by
/// 1 / (1 - h / h_UAV).
Vec2 project_elevated(const Vec2& footprint_px, double h,
                      const measure::CameraGeometry& cam);

/// Monotone-chain convex hull, counter-clockwise.
std::vector<Vec2> convex_hull(std::vector<Vec2> pts);

/// Minimum-area enclosing rectangle of a point set (rotating calipers).
std::array<Vec2, 4> min_area_rect(std::span<const Vec2> pts);

/// Monte-Carlo check of the closed-form error bounds against measured
/// errors at the mapping, bounding-box and timing stages.
struct BudgetReport {
  struct Stage {
    std::size_t checks = 0;
    std::size_t violations = 0;
    double worst_excess = 0.0;  // max (measured - bound), meters/seconds
  };
  Stage mapping;
  Stage box;
  Stage timing;

  std::size_t checks() const {
    return mapping.checks + box.checks + timing.checks;
  }
  std::size_t violations() const {
    return mapping.violations + box.violations + timing.violations;
  }
  double violation_rate() const {
    return checks() == 0 ? 0.0
                         : static_cast<double>(violations()) / checks();
  }
};

BudgetReport validate_budget(const Scenario& scn, int n_trials);

}  // namespace uavtrack::sim
