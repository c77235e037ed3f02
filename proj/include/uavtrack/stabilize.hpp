#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "uavtrack/geometry.hpp"

namespace uavtrack::stabilize {

struct DegenerateSample : Error {
  using Error::Error;
};
struct NoConsensus : Error {
  using Error::Error;
};

/// A matched point pair between the reference frame and the current frame.
struct Correspondence {
  Vec2 ref_pt = Vec2::Zero();  // pixels, reference frame
  Vec2 cur_pt = Vec2::Zero();  // pixels, current frame
};

/// p -> scale * R(rotation) * p + translation, all in pixels.
struct SimilarityTransform {
  double scale = 1.0;
  double rotation = 0.0;  // radians
  Vec2 translation = Vec2::Zero();

  Vec2 apply(const Vec2& p) const;
  SimilarityTransform inverse() const;
  /// Composition: (a.compose(b))(p) == a(b(p)).
  SimilarityTransform compose(const SimilarityTransform& b) const;
};

struct RobustFitConfig {
  double sigma_px = 1.0;       // inlier residual std dev
  double inlier_threshold_sigmas = 3.0;
  double min_inlier_ratio = 0.3;
  double confidence = 0.99;    // consensus stopping confidence
  int max_iterations = 2000;
  int min_iterations = 50;
  double gamma = 0.5;          // fixed inlier/outlier mixing weight
  double outlier_area_px2 = 1920.0 * 1080.0;  // uniform outlier support
  double min_scale = 0.5;      // hover-drift plausibility gate
  double max_scale = 2.0;
  double min_sample_separation_px = 1.0;
  std::uint64_t seed = 0;
};

struct RobustFitReport {
  int inlier_count = 0;
  double inlier_ratio = 0.0;
  double residual_rms = 0.0;  // pixels, over inliers
  int iterations_used = 0;
};

/// Least-squares similarity fit mapping cur_pt onto ref_pt; exact for two
/// correspondences. Throws DegenerateSample when the current points are
/// (nearly) coincident.
SimilarityTransform solve_similarity(std::span<const Correspondence> corrs);

/// MLESAC estimate of the current-to-reference similarity transform:
/// minimal two-point hypotheses scored by a Gaussian-inlier /
/// uniform-outlier mixture log-likelihood, followed by a least-squares
/// refit on the consensus set.
std::pair<SimilarityTransform, RobustFitReport> estimate_transform(
    std::span<const Correspondence> corrs, const RobustFitConfig& cfg = {});

/// Maps current-frame pixels into reference-frame pixel coordinates.
std::vector<Vec2> apply_transform(const SimilarityTransform& t,
                                  std::span<const Vec2> pts);

/// Mixture negative log-likelihood of a hypothesis over all
/// correspondences (lower is better).
double mlesac_score(const SimilarityTransform& t,
                    std::span<const Correspondence> corrs,
                    const RobustFitConfig& cfg);

}  // namespace uavtrack::stabilize
