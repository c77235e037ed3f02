#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "uavtrack/filter.hpp"
#include "uavtrack/geometry.hpp"

namespace uavtrack::bench {

struct OutOfSpan : Error {
  using Error::Error;
};
struct LengthMismatch : Error {
  using Error::Error;
};

/// One sample of the reference-sensor trace.
struct ReferenceSample {
  double t = 0.0;  // seconds UTC
  Vec2 pos = Vec2::Zero();     // meters
  double v_over_ground = 0.0;  // m/s
  double a_over_ground = 0.0;  // m/s^2
  double yaw = 0.0;            // radians
  double sideslip = 0.0;       // radians
  double cog = 0.0;            // radians
};

/// Absolute-error statistics for one benchmarked variable, in that
/// variable's plot units (m, m/s, m/s^2 or degrees).
struct VariableStats {
  double mean_abs = 0.0;
  double rmse = 0.0;
  double max = 0.0;
  std::size_t count = 0;
  /// (error value, fraction of samples with error <= value), ascending.
  std::vector<std::pair<double, double>> cumulative;
};

struct BenchReport {
  VariableStats position;      // meters
  VariableStats velocity;      // m/s, over-ground magnitude
  VariableStats acceleration;  // m/s^2, over-ground magnitude
  VariableStats yaw;           // degrees
  VariableStats sideslip;      // degrees, validity-gated
  VariableStats cog;           // degrees
};

/// Linear interpolation of the trace at the query times; angular fields
/// interpolate along the shortest arc. Throws OutOfSpan for queries
/// outside the trace.
std::vector<ReferenceSample> resample_reference(
    const std::vector<ReferenceSample>& trace,
    const std::vector<double>& times);

/// Per-variable absolute errors between the estimated track and the
/// time-aligned reference, with cumulative-frequency tables.
BenchReport compare(const std::vector<filter::TrackPoint>& est,
                    const std::vector<ReferenceSample>& ref);

/// Writes one two-column plot-data file per variable (`position.dat`,
/// `velocity.dat`, `acceleration.dat`, `yaw.dat`, `sideslip.dat`,
/// `cog.dat`), header `error percent`, rows ascending by error.
void emit_plotdata(const BenchReport& report,
                   const std::filesystem::path& out_dir);

}  // namespace uavtrack::bench
