#pragma once

#include <array>
#include <string>
#include <vector>

#include "uavtrack/geometry.hpp"

namespace uavtrack::georef {

struct InsufficientGcps : Error {
  using Error::Error;
};
struct CoincidentGcps : Error {
  using Error::Error;
};
struct NonPositiveDistance : Error {
  using Error::Error;
};
struct ZeroBaseline : Error {
  using Error::Error;
};

/// Surveyed marker with paired ground (meters) and image (pixels) coordinates.
struct GroundControlPoint {
  std::string id;
  Vec2 ltp = Vec2::Zero();  // meters, east-north ground plane
  Vec2 pcf = Vec2::Zero();  // pixels, y-up image frame
};

/// Similarity transform taking image pixels to ground-plane meters.
///
/// A pixel p maps to R(theta_offset)^T * (p * alpha) - linear_offset.
struct FrameMapping {
  double alpha = 1.0;         // meters per pixel, > 0
  double theta_offset = 0.0;  // radians, (-pi, pi]
  Vec2 linear_offset = Vec2::Zero();  // meters
  std::array<std::string, 2> source_gcp_ids{};
};

Vec2 map_pixel(const FrameMapping& m, const Vec2& pixel);

/// Analytic inverse of map_pixel.
Vec2 pixel_for_ltp(const FrameMapping& m, const Vec2& ltp);

/// Exact two-point fit of the pixel-to-ground similarity transform.
/// Throws CoincidentGcps when either coordinate pair is degenerate.
FrameMapping fit_pair(const GroundControlPoint& a, const GroundControlPoint& b);

/// fit_pair on the GCPs with the given ids, looked up in `gcps`.
FrameMapping fit_mapping(const std::vector<GroundControlPoint>& gcps,
                         const std::array<std::string, 2>& pair);

struct CompensateConfig {
  double min_separation_px = 0.0;  // pairs closer than this are excluded
};

/// Fits every admissible GCP pair and averages the resulting mappings
/// (scalar mean on alpha and offset, circular mean on the rotation).
/// Falls back to the single widest pair when all pairs are below the
/// separation threshold.
FrameMapping compensate_gcps(const std::vector<GroundControlPoint>& gcps,
                             const CompensateConfig& cfg = {});

/// Similarity fraction between the seen and true ground resolution when
/// each of the two fitting GCPs is ambiguous by +-zeta pixels per axis:
/// d / (d + 2*sqrt(2*zeta^2)).
double similarity_fraction(double gcp_pair_pcf_distance, double zeta);

/// Worst-case rotation-offset error for a GCP baseline `delta` (pixels)
/// under +-2*zeta per-axis ambiguity, maximized over the four sign
/// combinations; the angle difference is wrapped to [0, pi].
double orientation_error_bound(const Vec2& delta, double zeta);

/// Ground-plane mapping error |R(eta_theta)*b - b| * alpha of a pixel b
/// caused by a rotation error; equals 2*sin(eta_theta/2)*|b|*alpha.
double rotation_point_error(const Vec2& b, double eta_theta, double alpha);

/// Linear-offset error (R(eta_theta)^T * (g*eta_alpha) - g) * alpha from
/// combined scaling and rotation errors at the fitting GCP pixel g.
Vec2 offset_error(const Vec2& g, double eta_alpha, double eta_theta,
                  double alpha);

/// Worst-case error budget of a fitted mapping under pixel ambiguity zeta.
struct MappingErrorBudget {
  double eta_alpha = 1.0;  // similarity fraction in (0, 1]
  double eta_theta = 0.0;  // radians, worst case
  Vec2 eta_offset = Vec2::Zero();  // meters, per-component worst case
  double zeta = 1.0;               // pixels
  double alpha = 1.0;              // meters per pixel of the fitted mapping
  double pair_distance_px = 0.0;   // pixel separation of the fitting pair
  Vec2 anchor_gcp_pcf = Vec2::Zero();
  std::array<std::string, 2> gcp_pair_used{};

  /// Rotation-induced mapping error at a query pixel (meters).
  double eta_point(const Vec2& pixel) const;

  /// Two-sided range of the seen/true scale ratio: [eta_alpha, scale_high].
  double scale_ratio_high() const;

  /// Worst-case magnitude of the refit linear-offset deviation, including
  /// the anchor GCP's own +-zeta ambiguity (meters).
  double offset_refit_bound() const;

  /// Worst-case total mapping error at a query pixel: rotation and scale
  /// deviation at the pixel plus the offset deviation (meters).
  double point_bound_total(const Vec2& pixel) const;
};

/// Budget for the mapping fitted from the pair (a, b) with ambiguity zeta.
MappingErrorBudget error_budget(const GroundControlPoint& a,
                                const GroundControlPoint& b, double alpha,
                                double zeta);

}  // namespace uavtrack::georef
