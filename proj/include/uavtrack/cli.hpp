#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>

#include "uavtrack/config.hpp"

namespace uavtrack::cli {

/// Fits the compensated mapping from a GCP file and writes mapping.json
/// (transform + error budget) into out_dir. Warns on `log` when the GCP
/// spread is below min_gcp_separation_frac of the image diagonal.
void cmd_calibrate(const std::filesystem::path& gcps_csv,
                   const config::PipelineConfig& cfg,
                   const std::filesystem::path& out_dir, std::ostream& log);

/// Robust per-frame drift estimation from a correspondence file; writes
/// stab.csv into out_dir.
void cmd_stabilize(const std::filesystem::path& matches_csv,
                   const config::PipelineConfig& cfg,
                   const std::filesystem::path& out_dir, std::ostream& log);

/// Full pipeline: stabilize detections, build measurements, attach UTC
/// timestamps, filter. Writes state.csv, measurements.csv and
/// timebase.json into out_dir.
void cmd_track(const std::filesystem::path& detections_csv,
               const std::filesystem::path& mapping_json,
               const std::optional<std::filesystem::path>& stab_csv,
               const std::filesystem::path& led_csv,
               const config::PipelineConfig& cfg,
               const std::filesystem::path& out_dir, std::ostream& log);

/// Prints every closed-form error bound for the configured geometry as
/// JSON on `out`.
void cmd_errors(const config::PipelineConfig& cfg, std::ostream& out);

/// Compares state.csv against reference.csv; writes report.json and the
/// six cumulative plot-data files into out_dir.
void cmd_bench(const std::filesystem::path& state_csv,
               const std::filesystem::path& reference_csv,
               const std::filesystem::path& out_dir, std::ostream& log);

/// Generates the full fixture set for a scenario file into out_dir:
/// detections.csv, gcps.csv, matches.csv, led_events.csv, reference.csv
/// and a matching config.json.
void cmd_simulate(const std::filesystem::path& scenario_json,
                  const std::filesystem::path& out_dir,
                  const std::optional<std::uint64_t>& seed_override,
                  std::ostream& log);

}  // namespace uavtrack::cli
