#include "uavtrack/stabilize.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <random>

namespace uavtrack::stabilize {

namespace {

using Complexd = std::complex<double>;

Complexd to_complex(const Vec2& v) { return {v.x(), v.y()}; }

SimilarityTransform from_complex(const Complexd& a, const Complexd& b) {
  SimilarityTransform t;
  t.scale = std::abs(a);
  t.rotation = std::arg(a);
  t.translation = Vec2(b.real(), b.imag());
  return t;
}

double residual(const SimilarityTransform& t, const Correspondence& c) {
  return (t.apply(c.cur_pt) - c.ref_pt).norm();
}

}  // namespace

Vec2 SimilarityTransform::apply(const Vec2& p) const {
  return scale * (rotation2(rotation) * p) + translation;
}

SimilarityTransform SimilarityTransform::inverse() const {
  SimilarityTransform inv;
  inv.scale = 1.0 / scale;
  inv.rotation = -rotation;
  inv.translation =
      -(rotation2(inv.rotation) * translation) * inv.scale;
  return inv;
}

SimilarityTransform SimilarityTransform::compose(
    const SimilarityTransform& b) const {
  SimilarityTransform out;
  out.scale = scale * b.scale;
  out.rotation = wrap_angle(rotation + b.rotation);
  out.translation = apply(b.translation);
  return out;
}

SimilarityTransform solve_similarity(std::span<const Correspondence> corrs) {
  if (corrs.size() < 2)
    throw DegenerateSample("similarity fit needs >= 2 correspondences");
  Complexd cur_mean{0.0, 0.0}, ref_mean{0.0, 0.0};
  for (const auto& c : corrs) {
    cur_mean += to_complex(c.cur_pt);
    ref_mean += to_complex(c.ref_pt);
  }
  const double n = static_cast<double>(corrs.size());
  cur_mean /= n;
  ref_mean /= n;

  Complexd num{0.0, 0.0};
  double den = 0.0;
  for (const auto& c : corrs) {
    const Complexd dc = to_complex(c.cur_pt) - cur_mean;
    num += (to_complex(c.ref_pt) - ref_mean) * std::conj(dc);
    den += std::norm(dc);
  }
  if (den < 1e-12)
    throw DegenerateSample("current-frame points are coincident");
  const Complexd a = num / den;
  return from_complex(a, ref_mean - a * cur_mean);
}

double mlesac_score(const SimilarityTransform& t,
                    std::span<const Correspondence> corrs,
                    const RobustFitConfig& cfg) {
  const double var = cfg.sigma_px * cfg.sigma_px;
  const double inlier_norm = cfg.gamma / (2.0 * kPi * var);
  const double outlier_density = (1.0 - cfg.gamma) / cfg.outlier_area_px2;
  double score = 0.0;
  for (const auto& c : corrs) {
    const double e = residual(t, c);
    const double like =
        inlier_norm * std::exp(-0.5 * e * e / var) + outlier_density;
    score -= std::log(like);
  }
  return score;
}

std::pair<SimilarityTransform, RobustFitReport> estimate_transform(
    std::span<const Correspondence> corrs, const RobustFitConfig& cfg) {
  if (corrs.size() < 2)
    throw DegenerateSample("estimate_transform needs >= 2 correspondences");

  const double threshold = cfg.inlier_threshold_sigmas * cfg.sigma_px;
  const auto count_inliers = [&](const SimilarityTransform& t) {
    int count = 0;
    for (const auto& c : corrs)
      if (residual(t, c) < threshold) ++count;
    return count;
  };

  std::mt19937_64 rng(cfg.seed);
  std::uniform_int_distribution<std::size_t> pick(0, corrs.size() - 1);

  SimilarityTransform best;
  double best_score = std::numeric_limits<double>::infinity();
  bool have_best = false;
  int required = cfg.min_iterations;
  int iter = 0;
  for (; iter < cfg.max_iterations && iter < required; ++iter) {
    const std::size_t i = pick(rng);
    std::size_t j = pick(rng);
    if (j == i) j = (j + 1) % corrs.size();
    const Correspondence sample[2] = {corrs[i], corrs[j]};
    if ((sample[0].cur_pt - sample[1].cur_pt).norm() <
            cfg.min_sample_separation_px ||
        (sample[0].ref_pt - sample[1].ref_pt).norm() <
            cfg.min_sample_separation_px)
      continue;

    SimilarityTransform hyp;
    try {
      hyp = solve_similarity(sample);
    } catch (const DegenerateSample&) {
      continue;
    }
    if (hyp.scale < cfg.min_scale || hyp.scale > cfg.max_scale) continue;

    const double score = mlesac_score(hyp, corrs, cfg);
    if (score < best_score) {
      best_score = score;
      best = hyp;
      have_best = true;
      const double w =
          static_cast<double>(count_inliers(hyp)) / corrs.size();
      if (w > 0.0 && w < 1.0) {
        const double denom = std::log1p(-w * w);
        const int n = static_cast<int>(
            std::ceil(std::log1p(-cfg.confidence) / denom));
        required = std::clamp(n, cfg.min_iterations, cfg.max_iterations);
      } else if (w >= 1.0) {
        required = std::min(required, std::max(iter + 1, cfg.min_iterations));
      }
    }
  }
  if (!have_best)
    throw DegenerateSample(
        "no non-degenerate minimal sample produced a plausible transform");

  // Least-squares refit on the consensus set, re-classifying once.
  std::vector<Correspondence> inliers;
  for (int pass = 0; pass < 2; ++pass) {
    inliers.clear();
    for (const auto& c : corrs)
      if (residual(best, c) < threshold) inliers.push_back(c);
    if (inliers.size() < 2) break;
    best = solve_similarity(inliers);
  }

  RobustFitReport report;
  report.iterations_used = iter;
  double sq_sum = 0.0;
  inliers.clear();
  for (const auto& c : corrs) {
    const double e = residual(best, c);
    if (e < threshold) {
      inliers.push_back(c);
      sq_sum += e * e;
    }
  }
  report.inlier_count = static_cast<int>(inliers.size());
  report.inlier_ratio =
      static_cast<double>(report.inlier_count) / corrs.size();
  report.residual_rms =
      inliers.empty() ? 0.0 : std::sqrt(sq_sum / inliers.size());
  if (report.inlier_ratio < cfg.min_inlier_ratio)
    throw NoConsensus("inlier ratio " + std::to_string(report.inlier_ratio) +
                      " below minimum " +
                      std::to_string(cfg.min_inlier_ratio));
  return {best, report};
}

std::vector<Vec2> apply_transform(const SimilarityTransform& t,
                                  std::span<const Vec2> pts) {
  std::vector<Vec2> out;
  out.reserve(pts.size());
  for (const auto& p : pts) out.push_back(t.apply(p));
  return out;
}

}  // namespace uavtrack::stabilize
