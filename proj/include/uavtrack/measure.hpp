#pragma once

#include <array>
#include <optional>

#include "uavtrack/geometry.hpp"
#include "uavtrack/georef.hpp"

namespace uavtrack::measure {

struct DegenerateBox : Error {
  using Error::Error;
};
struct CornerAboveCamera : Error {
  using Error::Error;
};
struct ZeroSideLength : Error {
  using Error::Error;
};

/// Four unordered pixel corners of one detected vehicle.
struct RotatedBBox {
  std::array<Vec2, 4> corners{};
};

struct VehicleDims {
  double width = 1.80;      // meters
  double length = 4.50;     // meters
  double clearance = 0.15;  // meters, chassis bottom above ground
};

struct CameraGeometry {
  Eigen::Vector2i resolution{1920, 1080};  // pixels
  double hover_altitude = 50.0;            // meters
  double alpha = 0.0334;                   // meters per pixel

  Vec2 principal_point() const {
    return 0.5 * resolution.cast<double>();
  }
  double diagonal_px() const {
    return resolution.cast<double>().norm();
  }
};

/// One row of the Kalman filter measurement vector plus bookkeeping.
struct Measurement {
  long frame = 0;
  Vec2 center = Vec2::Zero();  // meters, ground plane
  double yaw = 0.0;            // radians, (-pi, pi]; direction only
  double est_width = 0.0;      // meters, observed
  double est_length = 0.0;     // meters, observed
  bool quality = true;         // false when the shape gate failed
};

struct MeasureConfig {
  VehicleDims generic_dims{};
  double side_agreement_tol = 0.20;  // opposite-side length gate
};

/// Ascending side magnitudes from the anchor corner to the other three.
struct BoxSides {
  std::array<double, 3> s{};  // ascending: width, length, diagonal
  int width_index = 0;        // corner index of s[0]
  int length_index = 0;       // corner index of s[1]
  int diagonal_index = 0;     // corner index of s[2]
};

/// Magnitudes |b_j - b_anchor| sorted ascending; ties broken by corner
/// index. Throws DegenerateBox when corners coincide.
BoxSides side_order(const RotatedBBox& box, int anchor = 0);

/// Component-wise (max+min)/2 of the mapped corners.
Vec2 raw_center(const std::array<Vec2, 4>& ltp_corners);

/// Orientation of the anchor-to-length-corner vector, in (-pi, pi].
double raw_yaw(const std::array<Vec2, 4>& ltp_corners, int anchor,
               int length_index);

/// Relief-displacement correction of a pixel corner at known height:
/// returns the corner shifted toward the principal point by
/// seen * h_corner / h_UAV. Throws CornerAboveCamera.
Vec2 relief_shift(const Vec2& corner_px, double h_corner,
                  const CameraGeometry& cam);

/// Worst-case corrected-corner error (sqrt(2) + h/h_UAV) * alpha, meters.
double corner_error_bound(double h_corner, const CameraGeometry& cam);

/// Scales the anchor-to-corner vectors to the known vehicle dimensions and
/// returns the midpoint of the two scaled corners. Inputs and the target
/// dimensions are in the same (metric) plane.
Vec2 rescale_box(const Vec2& anchor, const Vec2& length_corner,
                 const Vec2& width_corner, double target_length,
                 double target_width);

/// Positioning bound when relief displacement is left uncorrected and the
/// corner height is only known to lie in [h_min, h_max], meters.
double scale_error_bound(const Vec2& corner_px, const CameraGeometry& cam,
                         double h_min, double h_max);

/// True when the corners form a convex quadrilateral whose opposite side
/// lengths agree within `tol` (relative).
bool is_near_rectangular(const RotatedBBox& box, double tol);

/// Full measurement chain: map corners to the ground plane, pick the
/// anchor nearest the principal point, relief-correct it at the chassis
/// clearance height, rescale to the known dims, and derive center + yaw.
/// Falls back to the uncorrected box center (quality = false) when the
/// shape gate fails.
Measurement make_measurement(const RotatedBBox& box,
                             const georef::FrameMapping& mapping,
                             const CameraGeometry& cam,
                             const std::optional<VehicleDims>& dims,
                             const MeasureConfig& cfg = {});

}  // namespace uavtrack::measure
