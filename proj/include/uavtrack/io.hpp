#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "uavtrack/bench.hpp"
#include "uavtrack/filter.hpp"
#include "uavtrack/geometry.hpp"
#include "uavtrack/georef.hpp"
#include "uavtrack/measure.hpp"
#include "uavtrack/stabilize.hpp"
#include "uavtrack/sync.hpp"

namespace uavtrack::io {

/// Parse failure carrying file, 1-based line and column context.
struct ParseError : Error {
  ParseError(const std::filesystem::path& file, std::size_t line,
             std::size_t column, const std::string& what);
};

/// Formats a double with up to 9 significant digits, locale-independent.
std::string format_number(double v);

// gcps.csv: id,x_ltp_m,y_ltp_m,x_pcf_px,y_pcf_px
std::vector<georef::GroundControlPoint> read_gcps(
    const std::filesystem::path& file);
void write_gcps(const std::filesystem::path& file,
                const std::vector<georef::GroundControlPoint>& gcps);

// detections.csv: frame,x1,y1,x2,y2,x3,y3,x4,y4
std::vector<std::pair<long, measure::RotatedBBox>> read_detections(
    const std::filesystem::path& file);
void write_detections(
    const std::filesystem::path& file,
    const std::vector<std::pair<long, measure::RotatedBBox>>& dets);

// matches.csv: frame,x_ref_px,y_ref_px,x_cur_px,y_cur_px
std::vector<std::pair<long, stabilize::Correspondence>> read_matches(
    const std::filesystem::path& file);
void write_matches(
    const std::filesystem::path& file,
    const std::vector<std::pair<long, stabilize::Correspondence>>& matches);

// stab.csv: frame,scale,rotation_deg,tx_px,ty_px,inliers,rms_px
struct StabRow {
  long frame = 0;
  stabilize::SimilarityTransform transform;
  int inliers = 0;
  double rms_px = 0.0;
};
std::vector<StabRow> read_stab(const std::filesystem::path& file);
void write_stab(const std::filesystem::path& file,
                const std::vector<StabRow>& rows);

// led_events.csv: frame,utc_second
std::vector<sync::LedEvent> read_led_events(const std::filesystem::path& file);
void write_led_events(const std::filesystem::path& file,
                      const std::vector<sync::LedEvent>& events);

// measurements.csv: frame,x_m,y_m,yaw_deg,width_m,length_m,quality
std::vector<measure::Measurement> read_measurements(
    const std::filesystem::path& file);
void write_measurements(const std::filesystem::path& file,
                        const std::vector<measure::Measurement>& rows);

// state.csv: t_utc_s,frame,x_m,y_m,vx_mps,vy_mps,ax_mps2,ay_mps2,yaw_deg,
//            yawrate_degps,cog_deg,sideslip_deg,sideslip_valid
std::vector<filter::TrackPoint> read_state(const std::filesystem::path& file);
void write_state(const std::filesystem::path& file,
                 const std::vector<filter::TrackPoint>& points);

// reference.csv: t_utc_s,x_m,y_m,v_mps,a_mps2,yaw_deg,sideslip_deg,cog_deg
std::vector<bench::ReferenceSample> read_reference(
    const std::filesystem::path& file);
void write_reference(const std::filesystem::path& file,
                     const std::vector<bench::ReferenceSample>& trace);

}  // namespace uavtrack::io
