#include "uavtrack/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace uavtrack::measure {

namespace {

constexpr double kDegeneratePx = 1e-9;

void check_distinct(const RotatedBBox& box) {
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      if ((box.corners[i] - box.corners[j]).norm() < kDegeneratePx)
        throw DegenerateBox("bounding-box corners " + std::to_string(i) +
                            " and " + std::to_string(j) + " coincide");
}

}  // namespace

BoxSides side_order(const RotatedBBox& box, int anchor) {
  check_distinct(box);
  struct Side {
    double magnitude;
    int index;
  };
  std::array<Side, 3> sides;
  int n = 0;
  for (int i = 0; i < 4; ++i) {
    if (i == anchor) continue;
    sides[n++] = {(box.corners[i] - box.corners[anchor]).norm(), i};
  }
  std::sort(sides.begin(), sides.end(), [](const Side& a, const Side& b) {
    if (a.magnitude != b.magnitude) return a.magnitude < b.magnitude;
    return a.index < b.index;
  });
  BoxSides out;
  out.s = {sides[0].magnitude, sides[1].magnitude, sides[2].magnitude};
  out.width_index = sides[0].index;
  out.length_index = sides[1].index;
  out.diagonal_index = sides[2].index;
  return out;
}

Vec2 raw_center(const std::array<Vec2, 4>& ltp_corners) {
  Vec2 lo = ltp_corners[0];
  Vec2 hi = ltp_corners[0];
  for (const auto& c : ltp_corners) {
    lo = lo.cwiseMin(c);
    hi = hi.cwiseMax(c);
  }
  return 0.5 * (lo + hi);
}

double raw_yaw(const std::array<Vec2, 4>& ltp_corners, int anchor,
               int length_index) {
  const Vec2 d = ltp_corners[length_index] - ltp_corners[anchor];
  if (d.norm() < kDegeneratePx)
    throw DegenerateBox("length side has zero extent");
  return wrap_angle(std::atan2(d.y(), d.x()));
}

Vec2 relief_shift(const Vec2& corner_px, double h_corner,
                  const CameraGeometry& cam) {
  if (h_corner < 0.0)
    throw Error("corner height must be >= 0, got " +
                std::to_string(h_corner));
  if (h_corner >= cam.hover_altitude)
    throw CornerAboveCamera("corner height " + std::to_string(h_corner) +
                            " m is not below the hover altitude " +
                            std::to_string(cam.hover_altitude) + " m");
  const Vec2 seen = corner_px - cam.principal_point();
  return corner_px - seen * (h_corner / cam.hover_altitude);
}

double corner_error_bound(double h_corner, const CameraGeometry& cam) {
  return (std::sqrt(2.0) + h_corner / cam.hover_altitude) * cam.alpha;
}

Vec2 rescale_box(const Vec2& anchor, const Vec2& length_corner,
                 const Vec2& width_corner, double target_length,
                 double target_width) {
  const Vec2 u_len = length_corner - anchor;
  const Vec2 u_wid = width_corner - anchor;
  if (u_len.norm() < kDegeneratePx || u_wid.norm() < kDegeneratePx)
    throw ZeroSideLength("bounding-box side has zero length");
  const Vec2 scaled_len = anchor + u_len * (target_length / u_len.norm());
  const Vec2 scaled_wid = anchor + u_wid * (target_width / u_wid.norm());
  return 0.5 * (scaled_len + scaled_wid);
}

double scale_error_bound(const Vec2& corner_px, const CameraGeometry& cam,
                         double h_min, double h_max) {
  const Vec2 seen = corner_px - cam.principal_point();
  return seen.norm() * cam.alpha * (h_max - h_min) /
         (2.0 * cam.hover_altitude);
}

bool is_near_rectangular(const RotatedBBox& box, double tol) {
  Vec2 centroid = Vec2::Zero();
  for (const auto& c : box.corners) centroid += c;
  centroid /= 4.0;

  std::array<int, 4> order = {0, 1, 2, 3};
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const Vec2 da = box.corners[a] - centroid;
    const Vec2 db = box.corners[b] - centroid;
    return std::atan2(da.y(), da.x()) < std::atan2(db.y(), db.x());
  });

  std::array<Vec2, 4> poly;
  for (int i = 0; i < 4; ++i) poly[i] = box.corners[order[i]];

  std::array<double, 4> side_len;
  for (int i = 0; i < 4; ++i) {
    const Vec2 e0 = poly[(i + 1) % 4] - poly[i];
    const Vec2 e1 = poly[(i + 2) % 4] - poly[(i + 1) % 4];
    const double cross = e0.x() * e1.y() - e0.y() * e1.x();
    if (cross <= 0.0) return false;  // angle-ordered, so CCW when convex
    side_len[i] = e0.norm();
  }
  for (int i = 0; i < 2; ++i) {
    const double a = side_len[i];
    const double b = side_len[i + 2];
    if (std::abs(a - b) > tol * std::max(a, b)) return false;
  }
  return true;
}

Measurement make_measurement(const RotatedBBox& box,
                             const georef::FrameMapping& mapping,
                             const CameraGeometry& cam,
                             const std::optional<VehicleDims>& dims,
                             const MeasureConfig& cfg) {
  check_distinct(box);

  const Vec2 principal = cam.principal_point();
  int anchor = 0;
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 4; ++i) {
    const double d = (box.corners[i] - principal).norm();
    if (d < best) {
      best = d;
      anchor = i;
    }
  }

  const BoxSides sides = side_order(box, anchor);
  const VehicleDims used = dims.value_or(cfg.generic_dims);

  Measurement z;
  z.est_width = sides.s[0] * cam.alpha;
  z.est_length = sides.s[1] * cam.alpha;
  z.quality = is_near_rectangular(box, cfg.side_agreement_tol);

  if (z.quality) {
    const Vec2 anchor_px = relief_shift(box.corners[anchor], used.clearance, cam);
    const Vec2 anchor_ltp = georef::map_pixel(mapping, anchor_px);
    const Vec2 len_ltp =
        georef::map_pixel(mapping, box.corners[sides.length_index]);
    const Vec2 wid_ltp =
        georef::map_pixel(mapping, box.corners[sides.width_index]);
    z.center = rescale_box(anchor_ltp, len_ltp, wid_ltp, used.length,
                           used.width);
    const Vec2 d = len_ltp - anchor_ltp;
    z.yaw = wrap_angle(std::atan2(d.y(), d.x()));
  } else {
    // Shape gate failed: emit the uncorrected box center, no rescaling.
    std::array<Vec2, 4> mapped;
    for (int i = 0; i < 4; ++i)
      mapped[i] = georef::map_pixel(mapping, box.corners[i]);
    z.center = raw_center(mapped);
    z.yaw = raw_yaw(mapped, anchor, sides.length_index);
  }
  return z;
}

}  // namespace uavtrack::measure
