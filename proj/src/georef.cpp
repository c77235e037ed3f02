#include "uavtrack/georef.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace uavtrack::georef {

namespace {

constexpr double kDegeneratePx = 1e-6;

const GroundControlPoint& find_gcp(const std::vector<GroundControlPoint>& gcps,
                                   const std::string& id) {
  for (const auto& g : gcps) {
    if (g.id == id) return g;
  }
  throw InsufficientGcps("GCP id not found: " + id);
}

}  // namespace

Vec2 map_pixel(const FrameMapping& m, const Vec2& pixel) {
  return rotation2(m.theta_offset).transpose() * (pixel * m.alpha) -
         m.linear_offset;
}

Vec2 pixel_for_ltp(const FrameMapping& m, const Vec2& ltp) {
  return rotation2(m.theta_offset) * (ltp + m.linear_offset) / m.alpha;
}

FrameMapping fit_pair(const GroundControlPoint& a,
                      const GroundControlPoint& b) {
  const Vec2 d_pcf = b.pcf - a.pcf;
  const Vec2 d_ltp = b.ltp - a.ltp;
  if (d_pcf.norm() < kDegeneratePx)
    throw CoincidentGcps("GCPs " + a.id + "/" + b.id +
                         " coincide in pixel coordinates");
  if (d_ltp.norm() < kDegeneratePx)
    throw CoincidentGcps("GCPs " + a.id + "/" + b.id +
                         " coincide in ground coordinates");

  FrameMapping m;
  m.alpha = d_ltp.norm() / d_pcf.norm();
  const double theta_pcf = std::atan2(d_pcf.y() * m.alpha, d_pcf.x() * m.alpha);
  const double theta_ltp = std::atan2(d_ltp.y(), d_ltp.x());
  m.theta_offset = wrap_angle(theta_pcf - theta_ltp);
  const Vec2 rotated =
      rotation2(m.theta_offset).transpose() * (a.pcf * m.alpha);
  m.linear_offset = rotated - a.ltp;
  m.source_gcp_ids = {a.id, b.id};
  return m;
}

FrameMapping fit_mapping(const std::vector<GroundControlPoint>& gcps,
                         const std::array<std::string, 2>& pair) {
  if (gcps.size() < 2)
    throw InsufficientGcps("need at least 2 GCPs, got " +
                           std::to_string(gcps.size()));
  return fit_pair(find_gcp(gcps, pair[0]), find_gcp(gcps, pair[1]));
}

FrameMapping compensate_gcps(const std::vector<GroundControlPoint>& gcps,
                             const CompensateConfig& cfg) {
  if (gcps.size() < 2)
    throw InsufficientGcps("need at least 2 GCPs, got " +
                           std::to_string(gcps.size()));

  struct PairFit {
    double separation = 0.0;
    FrameMapping mapping;
  };
  std::vector<PairFit> fits;
  double widest = -1.0;
  std::size_t widest_i = 0, widest_j = 1;
  for (std::size_t i = 0; i < gcps.size(); ++i) {
    for (std::size_t j = i + 1; j < gcps.size(); ++j) {
      const double sep = (gcps[j].pcf - gcps[i].pcf).norm();
      if (sep < kDegeneratePx) continue;
      if (sep > widest) {
        widest = sep;
        widest_i = i;
        widest_j = j;
      }
      if (sep < cfg.min_separation_px) continue;
      fits.push_back({sep, fit_pair(gcps[i], gcps[j])});
    }
  }
  if (widest < 0.0)
    throw CoincidentGcps("all GCP pairs coincide in pixel coordinates");
  if (fits.empty()) {
    // Every pair is below the separation threshold; fall back to the
    // widest one rather than failing the calibration outright.
    return fit_pair(gcps[widest_i], gcps[widest_j]);
  }

  FrameMapping avg;
  double alpha_sum = 0.0;
  Vec2 offset_sum = Vec2::Zero();
  std::vector<double> thetas;
  thetas.reserve(fits.size());
  for (const auto& f : fits) {
    alpha_sum += f.mapping.alpha;
    offset_sum += f.mapping.linear_offset;
    thetas.push_back(f.mapping.theta_offset);
  }
  avg.alpha = alpha_sum / static_cast<double>(fits.size());
  avg.theta_offset = wrap_angle(circular_mean(thetas));
  avg.linear_offset = offset_sum / static_cast<double>(fits.size());
  avg.source_gcp_ids = {gcps[widest_i].id, gcps[widest_j].id};
  return avg;
}

double similarity_fraction(double gcp_pair_pcf_distance, double zeta) {
  if (!(gcp_pair_pcf_distance > 0.0))
    throw NonPositiveDistance("GCP pair distance must be > 0, got " +
                              std::to_string(gcp_pair_pcf_distance));
  if (zeta < 0.0)
    throw NonPositiveDistance("pixel ambiguity must be >= 0");
  return gcp_pair_pcf_distance /
         (gcp_pair_pcf_distance + 2.0 * std::sqrt(2.0 * zeta * zeta));
}

double orientation_error_bound(const Vec2& delta, double zeta) {
  if (delta.norm() < kDegeneratePx)
    throw ZeroBaseline("GCP baseline is zero");
  const double base = std::atan2(delta.y(), delta.x());
  double worst = 0.0;
  for (double sx : {-1.0, 1.0}) {
    for (double sy : {-1.0, 1.0}) {
      const double perturbed = std::atan2(delta.y() + sy * 2.0 * zeta,
                                          delta.x() + sx * 2.0 * zeta);
      worst = std::max(worst, angular_distance(perturbed, base));
    }
  }
  return worst;
}

double rotation_point_error(const Vec2& b, double eta_theta, double alpha) {
  return (rotation2(eta_theta) * b - b).norm() * alpha;
}

Vec2 offset_error(const Vec2& g, double eta_alpha, double eta_theta,
                  double alpha) {
  return (rotation2(eta_theta).transpose() * (g * eta_alpha) - g) * alpha;
}

double MappingErrorBudget::eta_point(const Vec2& pixel) const {
  return rotation_point_error(pixel, eta_theta, alpha);
}

double MappingErrorBudget::scale_ratio_high() const {
  const double spread = 2.0 * std::sqrt(2.0 * zeta * zeta);
  if (pair_distance_px <= spread)
    return std::numeric_limits<double>::infinity();
  return pair_distance_px / (pair_distance_px - spread);
}

namespace {

/// max |R(e)^T (p*rho) - p| * alpha over the extreme scale ratios and
/// rotation-error signs; the maximum of the underlying quadratic in rho
/// and |e| is attained at the interval endpoints.
double scaled_rotation_excursion(const Vec2& p, double eta_theta,
                                 double scale_lo, double scale_hi,
                                 double alpha) {
  double worst = 0.0;
  for (double rho : {scale_lo, scale_hi}) {
    for (double e : {eta_theta, -eta_theta}) {
      const double err =
          (rotation2(e).transpose() * (p * rho) - p).norm() * alpha;
      worst = std::max(worst, err);
    }
  }
  return worst;
}

}  // namespace

double MappingErrorBudget::offset_refit_bound() const {
  const double hi = scale_ratio_high();
  const double excursion =
      scaled_rotation_excursion(anchor_gcp_pcf, eta_theta, eta_alpha, hi, alpha);
  // The anchor GCP's own ambiguity shifts the refit offset by up to
  // sqrt(2)*zeta pixels, magnified by the largest admissible scale ratio.
  return excursion + std::sqrt(2.0) * zeta * hi * alpha;
}

double MappingErrorBudget::point_bound_total(const Vec2& pixel) const {
  const double hi = scale_ratio_high();
  return scaled_rotation_excursion(pixel, eta_theta, eta_alpha, hi, alpha) +
         offset_refit_bound();
}

MappingErrorBudget error_budget(const GroundControlPoint& a,
                                const GroundControlPoint& b, double alpha,
                                double zeta) {
  const Vec2 delta = b.pcf - a.pcf;
  MappingErrorBudget budget;
  budget.zeta = zeta;
  budget.alpha = alpha;
  budget.pair_distance_px = delta.norm();
  budget.eta_alpha = similarity_fraction(budget.pair_distance_px, zeta);
  budget.eta_theta = orientation_error_bound(delta, zeta);
  budget.anchor_gcp_pcf = a.pcf;
  budget.gcp_pair_used = {a.id, b.id};
  const Vec2 plus = offset_error(a.pcf, budget.eta_alpha, budget.eta_theta, alpha);
  const Vec2 minus =
      offset_error(a.pcf, budget.eta_alpha, -budget.eta_theta, alpha);
  budget.eta_offset =
      plus.cwiseAbs().cwiseMax(minus.cwiseAbs());
  return budget;
}

}  // namespace uavtrack::georef
