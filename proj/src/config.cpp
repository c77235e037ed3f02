#include "uavtrack/config.hpp"

#include <fstream>
#include <initializer_list>
#include <string>

#include <json.hpp>

namespace uavtrack::config {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                const std::string& where) {
  if (!obj.is_object())
    throw SchemaError(where + " must be a JSON object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* k : allowed)
      if (it.key() == k) {
        known = true;
        break;
      }
    if (!known)
      throw SchemaError("unknown key '" + it.key() + "' in " + where);
  }
}

template <typename T>
void read_if(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

void read_angle_deg(const json& obj, const char* key, double& out_rad) {
  if (obj.contains(key)) out_rad = deg2rad(obj.at(key).get<double>());
}

void read_vec2(const json& obj, const char* key, Vec2& out) {
  if (!obj.contains(key)) return;
  const auto& arr = obj.at(key);
  if (!arr.is_array() || arr.size() != 2)
    throw SchemaError(std::string(key) + " must be an array of 2 numbers");
  out = Vec2(arr[0].get<double>(), arr[1].get<double>());
}

json to_json(const Vec2& v) { return json::array({v.x(), v.y()}); }

json load_json(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw SchemaError("cannot open " + file.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError(file.string() + ": " + e.what());
  }
}

void dump_json(const std::filesystem::path& file, const json& j) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw Error("cannot open " + file.string() + " for writing");
  out << j.dump(2) << '\n';
}

measure::CameraGeometry camera_from_json(const json& obj,
                                         const std::string& where) {
  check_keys(obj, {"resolution_px", "hover_altitude_m", "alpha_m_per_px"},
             where);
  measure::CameraGeometry cam;
  if (obj.contains("resolution_px")) {
    const auto& arr = obj.at("resolution_px");
    if (!arr.is_array() || arr.size() != 2)
      throw SchemaError("resolution_px must be an array of 2 integers");
    cam.resolution = {arr[0].get<int>(), arr[1].get<int>()};
  }
  read_if(obj, "hover_altitude_m", cam.hover_altitude);
  read_if(obj, "alpha_m_per_px", cam.alpha);
  return cam;
}

json camera_to_json(const measure::CameraGeometry& cam) {
  return {{"resolution_px", {cam.resolution.x(), cam.resolution.y()}},
          {"hover_altitude_m", cam.hover_altitude},
          {"alpha_m_per_px", cam.alpha}};
}

measure::VehicleDims vehicle_from_json(const json& obj,
                                       const std::string& where) {
  check_keys(obj, {"width_m", "length_m", "clearance_m"}, where);
  measure::VehicleDims dims;
  read_if(obj, "width_m", dims.width);
  read_if(obj, "length_m", dims.length);
  read_if(obj, "clearance_m", dims.clearance);
  if (!(dims.width > 0.0 && dims.width < dims.length))
    throw SchemaError("vehicle dims must satisfy 0 < width < length");
  if (dims.clearance < 0.05 || dims.clearance > 0.5)
    throw SchemaError("vehicle clearance outside the [0.05, 0.5] m gate");
  return dims;
}

json vehicle_to_json(const measure::VehicleDims& dims) {
  return {{"width_m", dims.width},
          {"length_m", dims.length},
          {"clearance_m", dims.clearance}};
}

}  // namespace

PipelineConfig load_pipeline_config(const std::filesystem::path& file) {
  const json root = load_json(file);
  check_keys(root,
             {"camera", "zeta_px", "vehicle", "filter", "stabilize", "sync",
              "calibration", "budget"},
             "config");
  PipelineConfig cfg;
  if (root.contains("camera"))
    cfg.camera = camera_from_json(root.at("camera"), "camera");
  read_if(root, "zeta_px", cfg.zeta_px);
  if (root.contains("vehicle"))
    cfg.vehicle = vehicle_from_json(root.at("vehicle"), "vehicle");
  if (root.contains("filter")) {
    const auto& f = root.at("filter");
    check_keys(f,
               {"q_jerk", "q_yaw_acc", "r_pos_m2", "r_yaw_rad2",
                "v_min_cog_mps", "init_cov_scale", "r_lowq_scale"},
               "filter");
    read_if(f, "q_jerk", cfg.filter.q_jerk);
    read_if(f, "q_yaw_acc", cfg.filter.q_yaw_acc);
    read_if(f, "r_pos_m2", cfg.filter.r_pos);
    read_if(f, "r_yaw_rad2", cfg.filter.r_yaw);
    read_if(f, "v_min_cog_mps", cfg.filter.v_min_cog);
    read_if(f, "init_cov_scale", cfg.filter.init_cov_scale);
    read_if(f, "r_lowq_scale", cfg.filter.r_lowq_scale);
  }
  if (root.contains("stabilize")) {
    const auto& s = root.at("stabilize");
    check_keys(s,
               {"sigma_px", "inlier_threshold_sigmas", "min_inlier_ratio",
                "confidence", "max_iterations", "min_iterations", "gamma",
                "outlier_area_px2", "min_scale", "max_scale",
                "min_sample_separation_px", "seed"},
               "stabilize");
    read_if(s, "sigma_px", cfg.stabilize.sigma_px);
    read_if(s, "inlier_threshold_sigmas", cfg.stabilize.inlier_threshold_sigmas);
    read_if(s, "min_inlier_ratio", cfg.stabilize.min_inlier_ratio);
    read_if(s, "confidence", cfg.stabilize.confidence);
    read_if(s, "max_iterations", cfg.stabilize.max_iterations);
    read_if(s, "min_iterations", cfg.stabilize.min_iterations);
    read_if(s, "gamma", cfg.stabilize.gamma);
    read_if(s, "outlier_area_px2", cfg.stabilize.outlier_area_px2);
    read_if(s, "min_scale", cfg.stabilize.min_scale);
    read_if(s, "max_scale", cfg.stabilize.max_scale);
    read_if(s, "min_sample_separation_px",
            cfg.stabilize.min_sample_separation_px);
    read_if(s, "seed", cfg.stabilize.seed);
  }
  if (root.contains("sync")) {
    const auto& s = root.at("sync");
    check_keys(s, {"fps"}, "sync");
    read_if(s, "fps", cfg.sync_fps);
  }
  if (root.contains("calibration")) {
    const auto& c = root.at("calibration");
    check_keys(c, {"min_gcp_separation_frac"}, "calibration");
    read_if(c, "min_gcp_separation_frac", cfg.min_gcp_separation_frac);
  }
  if (root.contains("budget")) {
    const auto& b = root.at("budget");
    check_keys(b, {"speed_mps", "accel_mps2", "h_min_m", "h_max_m"},
               "budget");
    read_if(b, "speed_mps", cfg.budget_speed);
    read_if(b, "accel_mps2", cfg.budget_accel);
    read_if(b, "h_min_m", cfg.h_min);
    read_if(b, "h_max_m", cfg.h_max);
  }
  return cfg;
}

void save_pipeline_config(const std::filesystem::path& file,
                          const PipelineConfig& cfg) {
  json root;
  root["camera"] = camera_to_json(cfg.camera);
  root["zeta_px"] = cfg.zeta_px;
  root["vehicle"] = vehicle_to_json(cfg.vehicle);
  root["filter"] = {{"q_jerk", cfg.filter.q_jerk},
                    {"q_yaw_acc", cfg.filter.q_yaw_acc},
                    {"r_pos_m2", cfg.filter.r_pos},
                    {"r_yaw_rad2", cfg.filter.r_yaw},
                    {"v_min_cog_mps", cfg.filter.v_min_cog},
                    {"init_cov_scale", cfg.filter.init_cov_scale},
                    {"r_lowq_scale", cfg.filter.r_lowq_scale}};
  root["stabilize"] = {
      {"sigma_px", cfg.stabilize.sigma_px},
      {"inlier_threshold_sigmas", cfg.stabilize.inlier_threshold_sigmas},
      {"min_inlier_ratio", cfg.stabilize.min_inlier_ratio},
      {"confidence", cfg.stabilize.confidence},
      {"max_iterations", cfg.stabilize.max_iterations},
      {"min_iterations", cfg.stabilize.min_iterations},
      {"gamma", cfg.stabilize.gamma},
      {"outlier_area_px2", cfg.stabilize.outlier_area_px2},
      {"min_scale", cfg.stabilize.min_scale},
      {"max_scale", cfg.stabilize.max_scale},
      {"min_sample_separation_px", cfg.stabilize.min_sample_separation_px},
      {"seed", cfg.stabilize.seed}};
  root["sync"] = {{"fps", cfg.sync_fps}};
  root["calibration"] = {
      {"min_gcp_separation_frac", cfg.min_gcp_separation_frac}};
  root["budget"] = {{"speed_mps", cfg.budget_speed},
                    {"accel_mps2", cfg.budget_accel},
                    {"h_min_m", cfg.h_min},
                    {"h_max_m", cfg.h_max}};
  dump_json(file, root);
}

MappingFile load_mapping(const std::filesystem::path& file) {
  const json root = load_json(file);
  check_keys(root,
             {"alpha_m_per_px", "theta_offset_deg", "linear_offset_m",
              "source_gcp_ids", "budget"},
             "mapping");
  MappingFile mf;
  read_if(root, "alpha_m_per_px", mf.mapping.alpha);
  read_angle_deg(root, "theta_offset_deg", mf.mapping.theta_offset);
  read_vec2(root, "linear_offset_m", mf.mapping.linear_offset);
  if (root.contains("source_gcp_ids")) {
    const auto& ids = root.at("source_gcp_ids");
    if (!ids.is_array() || ids.size() != 2)
      throw SchemaError("source_gcp_ids must be an array of 2 strings");
    mf.mapping.source_gcp_ids = {ids[0].get<std::string>(),
                                 ids[1].get<std::string>()};
  }
  if (root.contains("budget")) {
    const auto& b = root.at("budget");
    check_keys(b,
               {"eta_alpha", "eta_theta_deg", "eta_point_m_at_corner",
                "eta_offset_m", "zeta_px", "gcp_pair_used",
                "pair_distance_px", "anchor_gcp_pcf_px"},
               "budget");
    read_if(b, "eta_alpha", mf.budget.eta_alpha);
    read_angle_deg(b, "eta_theta_deg", mf.budget.eta_theta);
    read_if(b, "eta_point_m_at_corner", mf.eta_point_at_corner);
    read_vec2(b, "eta_offset_m", mf.budget.eta_offset);
    read_if(b, "zeta_px", mf.budget.zeta);
    if (b.contains("gcp_pair_used")) {
      const auto& ids = b.at("gcp_pair_used");
      if (!ids.is_array() || ids.size() != 2)
        throw SchemaError("gcp_pair_used must be an array of 2 strings");
      mf.budget.gcp_pair_used = {ids[0].get<std::string>(),
                                 ids[1].get<std::string>()};
    }
    read_if(b, "pair_distance_px", mf.budget.pair_distance_px);
    read_vec2(b, "anchor_gcp_pcf_px", mf.budget.anchor_gcp_pcf);
    mf.budget.alpha = mf.mapping.alpha;
  }
  return mf;
}

void save_mapping(const std::filesystem::path& file, const MappingFile& mf) {
  json root;
  root["alpha_m_per_px"] = mf.mapping.alpha;
  root["theta_offset_deg"] = rad2deg(mf.mapping.theta_offset);
  root["linear_offset_m"] = to_json(mf.mapping.linear_offset);
  root["source_gcp_ids"] = {mf.mapping.source_gcp_ids[0],
                            mf.mapping.source_gcp_ids[1]};
  root["budget"] = {
      {"eta_alpha", mf.budget.eta_alpha},
      {"eta_theta_deg", rad2deg(mf.budget.eta_theta)},
      {"eta_point_m_at_corner", mf.eta_point_at_corner},
      {"eta_offset_m", to_json(mf.budget.eta_offset)},
      {"zeta_px", mf.budget.zeta},
      {"gcp_pair_used",
       {mf.budget.gcp_pair_used[0], mf.budget.gcp_pair_used[1]}},
      {"pair_distance_px", mf.budget.pair_distance_px},
      {"anchor_gcp_pcf_px", to_json(mf.budget.anchor_gcp_pcf)}};
  dump_json(file, root);
}

sim::Scenario load_scenario(const std::filesystem::path& file) {
  const json root = load_json(file);
  check_keys(root,
             {"maneuver", "duration_s", "fps", "speed_mps", "radius_m",
              "lane_offset_m", "heading_deg", "start_m", "sideslip_peak_deg",
              "camera", "vehicle", "roof_height_m", "mapping", "drift_walk",
              "noise", "utc_start_s", "n_matches", "n_gcps",
              "reference_rate_hz", "seed"},
             "scenario");
  sim::Scenario scn;
  if (root.contains("maneuver"))
    scn.maneuver = sim::maneuver_from_string(root.at("maneuver"));
  read_if(root, "duration_s", scn.duration);
  read_if(root, "fps", scn.fps);
  read_if(root, "speed_mps", scn.speed);
  read_if(root, "radius_m", scn.radius);
  read_if(root, "lane_offset_m", scn.lane_offset);
  read_angle_deg(root, "heading_deg", scn.heading);
  read_vec2(root, "start_m", scn.start);
  read_angle_deg(root, "sideslip_peak_deg", scn.sideslip_peak);
  if (root.contains("camera"))
    scn.camera = camera_from_json(root.at("camera"), "camera");
  if (root.contains("vehicle"))
    scn.vehicle = vehicle_from_json(root.at("vehicle"), "vehicle");
  read_if(root, "roof_height_m", scn.roof_height);
  if (root.contains("mapping")) {
    const auto& m = root.at("mapping");
    check_keys(m, {"theta_deg", "offset_m"}, "mapping");
    read_angle_deg(m, "theta_deg", scn.mapping_theta);
    read_vec2(m, "offset_m", scn.mapping_offset);
  }
  if (root.contains("drift_walk")) {
    const auto& d = root.at("drift_walk");
    check_keys(d, {"scale_std", "rot_std_deg", "trans_std_px"}, "drift_walk");
    read_if(d, "scale_std", scn.drift_walk.scale_std);
    read_angle_deg(d, "rot_std_deg", scn.drift_walk.rot_std);
    read_if(d, "trans_std_px", scn.drift_walk.trans_std);
  }
  if (root.contains("noise")) {
    const auto& n = root.at("noise");
    check_keys(n,
               {"corner_std_px", "quantize", "match_std_px", "outlier_rate",
                "gcp_ambiguity_px"},
               "noise");
    read_if(n, "corner_std_px", scn.noise.corner_std_px);
    read_if(n, "quantize", scn.noise.quantize);
    read_if(n, "match_std_px", scn.noise.match_std_px);
    read_if(n, "outlier_rate", scn.noise.outlier_rate);
    read_if(n, "gcp_ambiguity_px", scn.noise.gcp_ambiguity_px);
  }
  read_if(root, "utc_start_s", scn.utc_start);
  read_if(root, "n_matches", scn.n_matches);
  read_if(root, "n_gcps", scn.n_gcps);
  read_if(root, "reference_rate_hz", scn.reference_rate);
  read_if(root, "seed", scn.seed);
  return scn;
}

void save_scenario(const std::filesystem::path& file,
                   const sim::Scenario& scn) {
  json root;
  root["maneuver"] = sim::to_string(scn.maneuver);
  root["duration_s"] = scn.duration;
  root["fps"] = scn.fps;
  root["speed_mps"] = scn.speed;
  root["radius_m"] = scn.radius;
  root["lane_offset_m"] = scn.lane_offset;
  root["heading_deg"] = rad2deg(scn.heading);
  root["start_m"] = to_json(scn.start);
  root["sideslip_peak_deg"] = rad2deg(scn.sideslip_peak);
  root["camera"] = camera_to_json(scn.camera);
  root["vehicle"] = vehicle_to_json(scn.vehicle);
  root["roof_height_m"] = scn.roof_height;
  root["mapping"] = {{"theta_deg", rad2deg(scn.mapping_theta)},
                     {"offset_m", to_json(scn.mapping_offset)}};
  root["drift_walk"] = {{"scale_std", scn.drift_walk.scale_std},
                        {"rot_std_deg", rad2deg(scn.drift_walk.rot_std)},
                        {"trans_std_px", scn.drift_walk.trans_std}};
  root["noise"] = {{"corner_std_px", scn.noise.corner_std_px},
                   {"quantize", scn.noise.quantize},
                   {"match_std_px", scn.noise.match_std_px},
                   {"outlier_rate", scn.noise.outlier_rate},
                   {"gcp_ambiguity_px", scn.noise.gcp_ambiguity_px}};
  root["utc_start_s"] = scn.utc_start;
  root["n_matches"] = scn.n_matches;
  root["n_gcps"] = scn.n_gcps;
  root["reference_rate_hz"] = scn.reference_rate;
  root["seed"] = scn.seed;
  dump_json(file, root);
}

std::string timebase_json(const sync::TimeBase& tb) {
  json root;
  root["slope_s_per_frame"] = tb.slope;
  root["offset_utc_s"] = tb.offset;
  root["residual_max_s"] = tb.residual_max;
  root["eta_tau_s"] = 1.0 / tb.fps_nominal;
  return root.dump(2) + "\n";
}

std::string bench_report_json(const bench::BenchReport& report) {
  const auto stats = [](const bench::VariableStats& st) {
    return json{{"mean_abs", st.mean_abs},
                {"rmse", st.rmse},
                {"max", st.max},
                {"count", st.count}};
  };
  json root;
  root["position_m"] = stats(report.position);
  root["velocity_mps"] = stats(report.velocity);
  root["acceleration_mps2"] = stats(report.acceleration);
  root["yaw_deg"] = stats(report.yaw);
  root["sideslip_deg"] = stats(report.sideslip);
  root["cog_deg"] = stats(report.cog);
  return root.dump(2) + "\n";
}

}  // namespace uavtrack::config
