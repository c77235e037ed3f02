#pragma once

#include <filesystem>
#include <string>

#include "uavtrack/bench.hpp"
#include "uavtrack/filter.hpp"
#include "uavtrack/georef.hpp"
#include "uavtrack/measure.hpp"
#include "uavtrack/sim.hpp"
#include "uavtrack/stabilize.hpp"

namespace uavtrack::config {

struct SchemaError : Error {
  using Error::Error;
};

/// Everything a pipeline run needs besides the input files. All JSON keys
/// are optional; unknown keys are rejected.
struct PipelineConfig {
  measure::CameraGeometry camera{};
  double zeta_px = 1.0;
  measure::VehicleDims vehicle{};
  filter::FilterConfig filter{};
  stabilize::RobustFitConfig stabilize{};
  double sync_fps = 50.0;
  double min_gcp_separation_frac = 0.25;  // of the image diagonal
  // Reference dynamics for the synchronization bounds in the error report.
  double budget_speed = 13.89;  // m/s
  double budget_accel = 5.0;    // m/s^2
  double h_min = 0.11;          // m, lowest uncorrected corner height
  double h_max = 1.85;          // m, highest uncorrected corner height
};

PipelineConfig load_pipeline_config(const std::filesystem::path& file);
void save_pipeline_config(const std::filesystem::path& file,
                          const PipelineConfig& cfg);

/// mapping.json: fitted transform plus its error budget. Angles are
/// stored in degrees.
struct MappingFile {
  georef::FrameMapping mapping;
  georef::MappingErrorBudget budget;
  double eta_point_at_corner = 0.0;  // meters, at the far image corner
};

MappingFile load_mapping(const std::filesystem::path& file);
void save_mapping(const std::filesystem::path& file, const MappingFile& m);

sim::Scenario load_scenario(const std::filesystem::path& file);
void save_scenario(const std::filesystem::path& file,
                   const sim::Scenario& scn);

std::string timebase_json(const sync::TimeBase& tb);
std::string bench_report_json(const bench::BenchReport& report);

}  // namespace uavtrack::config
