#include "uavtrack/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace uavtrack::io {

namespace {

std::string context(const std::filesystem::path& file, std::size_t line,
                    std::size_t column, const std::string& what) {
  return file.string() + ":" + std::to_string(line) + ":" +
         std::to_string(column) + ": " + what;
}

/// Strict comma-separated reader; no quoting, one record per line.
class CsvFile {
 public:
  explicit CsvFile(const std::filesystem::path& file)
      : file_(file), in_(file) {
    if (!in_) throw ParseError(file, 0, 0, "cannot open file");
  }

  void expect_header(const std::string& expected) {
    std::string line;
    if (!std::getline(in_, line))
      throw ParseError(file_, 1, 1, "missing header, expected '" + expected +
                                        "'");
    ++line_no_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != expected)
      throw ParseError(file_, 1, 1,
                       "bad header '" + line + "', expected '" + expected +
                           "'");
  }

  /// Reads the next data row with exactly `n_fields` fields. Returns false
  /// at end of file. Blank lines are rejected except a trailing one.
  bool next_row(std::size_t n_fields) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) {
        if (in_.peek() == std::char_traits<char>::eof()) return false;
        throw ParseError(file_, line_no_, 1, "blank line");
      }
      fields_.clear();
      starts_.clear();
      std::size_t begin = 0;
      for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == ',') {
          fields_.push_back(line.substr(begin, i - begin));
          starts_.push_back(begin + 1);  // 1-based column
          begin = i + 1;
        }
      }
      if (fields_.size() != n_fields)
        throw ParseError(file_, line_no_, 1,
                         "expected " + std::to_string(n_fields) +
                             " fields, got " +
                             std::to_string(fields_.size()));
      return true;
    }
    return false;
  }

  double get_double(std::size_t idx) const {
    const std::string& f = fields_[idx];
    double value = 0.0;
    const auto [ptr, ec] =
        std::from_chars(f.data(), f.data() + f.size(), value);
    if (ec != std::errc{} || ptr != f.data() + f.size())
      throw ParseError(file_, line_no_, starts_[idx],
                       "'" + f + "' is not a number");
    return value;
  }

  long get_long(std::size_t idx) const {
    const std::string& f = fields_[idx];
    long value = 0;
    const auto [ptr, ec] =
        std::from_chars(f.data(), f.data() + f.size(), value);
    if (ec != std::errc{} || ptr != f.data() + f.size())
      throw ParseError(file_, line_no_, starts_[idx],
                       "'" + f + "' is not an integer");
    return value;
  }

  bool get_bool01(std::size_t idx) const {
    const long v = get_long(idx);
    if (v != 0 && v != 1)
      throw ParseError(file_, line_no_, starts_[idx],
                       "'" + fields_[idx] + "' is not 0 or 1");
    return v == 1;
  }

  std::string get_string(std::size_t idx) const {
    if (fields_[idx].empty())
      throw ParseError(file_, line_no_, starts_[idx], "empty field");
    return fields_[idx];
  }

 private:
  std::filesystem::path file_;
  std::ifstream in_;
  std::size_t line_no_ = 0;
  std::vector<std::string> fields_;
  std::vector<std::size_t> starts_;
};

std::ofstream open_out(const std::filesystem::path& file) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw Error("cannot open " + file.string() + " for writing");
  return out;
}

}  // namespace

ParseError::ParseError(const std::filesystem::path& file, std::size_t line,
                       std::size_t column, const std::string& what)
    : Error(context(file, line, column, what)) {}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

std::vector<georef::GroundControlPoint> read_gcps(
    const std::filesystem::path& file) {
  CsvFile csv(file);
  csv.expect_header("id,x_ltp_m,y_ltp_m,x_pcf_px,y_pcf_px");
  std::vector<georef::GroundControlPoint> out;
  while (csv.next_row(5)) {
    georef::GroundControlPoint g;
    g.id = csv.get_string(0);
    g.ltp = {csv.get_double(1), csv.get_double(2)};
    g.pcf = {csv.get_double(3), csv.get_double(4)};
    out.push_back(std::move(g));
  }
  return out;
}

void write_gcps(const std::filesystem::path& file,
                const std::vector<georef::GroundControlPoint>& gcps) {
  auto out = open_out(file);
  out << "id,x_ltp_m,y_ltp_m,x_pcf_px,y_pcf_px\n";
  for (const auto& g : gcps)
    out << g.id << ',' << format_number(g.ltp.x()) << ','
        << format_number(g.ltp.y()) << ',' << format_number(g.pcf.x()) << ','
        << format_number(g.pcf.y()) << '\n';
}

std::vector<std::pair<long, measure::RotatedBBox>> read_detections(
    const std::filesystem::path& file) {
  CsvFile csv(file);
  csv.expect_header("frame,x1,y1,x2,y2,x3,y3,x4,y4");
  std::vector<std::pair<long, measure::RotatedBBox>> out;
  while (csv.next_row(9)) {
    measure::RotatedBBox box;
    for (int c = 0; c < 4; ++c)
      box.corners[c] = {csv.get_double(1 + 2 * c), csv.get_double(2 + 2 * c)};
    out.emplace_back(csv.get_long(0), box);
  }
  return out;
}

void write_detections(
    const std::filesystem::path& file,
    const std::vector<std::pair<long, measure::RotatedBBox>>& dets) {
  auto out = open_out(file);
  out << "frame,x1,y1,x2,y2,x3,y3,x4,y4\n";
  for (const auto& [frame, box] : dets) {
    out << frame;
    for (const auto& c : box.corners)
      out << ',' << format_number(c.x()) << ',' << format_number(c.y());
    out << '\n';
  }
}

std::vector<std::pair<long, stabilize::Correspondence>> read_matches(
    const std::filesystem::path& file) {
  CsvFile csv(file);
  csv.expect_header("frame,x_ref_px,y_ref_px,x_cur_px,y_cur_px");
  std::vector<std::pair<long, stabilize::Correspondence>> out;
  while (csv.next_row(5)) {
    stabilize::Correspondence c;
    c.ref_pt = {csv.get_double(1), csv.get_double(2)};
    c.cur_pt = {csv.get_double(3), csv.get_double(4)};
    out.emplace_back(csv.get_long(0), c);
  }
  return out;
}

void write_matches(
    const std::filesystem::path& file,
    const std::vector<std::pair<long, stabilize::Correspondence>>& matches) {
  auto out = open_out(file);
  out << "frame,x_ref_px,y_ref_px,x_cur_px,y_cur_px\n";
  for (const auto& [frame, c] : matches)
    out << frame << ',' << format_number(c.ref_pt.x()) << ','
        << format_number(c.ref_pt.y()) << ',' << format_number(c.cur_pt.x())
        << ',' << format_number(c.cur_pt.y()) << '\n';
}

std::vector<StabRow> read_stab(const std::filesystem::path& file) {
  CsvFile csv(file);
  csv.expect_header("frame,scale,rotation_deg,tx_px,ty_px,inliers,rms_px");
  std::vector<StabRow> out;
  while (csv.next_row(7)) {
    StabRow row;
    row.frame = csv.get_long(0);
    row.transform.scale = csv.get_double(1);
    row.transform.rotation = deg2rad(csv.get_double(2));
    row.transform.translation = {csv.get_double(3), csv.get_double(4)};
    row.inliers = static_cast<int>(csv.get_long(5));
    row.rms_px = csv.get_double(6);
    out.push_back(row);
  }
  return out;
}

void write_stab(const std::filesystem::path& file,
                const std::vector<StabRow>& rows) {
  auto out = open_out(file);
  out << "frame,scale,rotation_deg,tx_px,ty_px,inliers,rms_px\n";
  for (const auto& r : rows)
    out << r.frame << ',' << format_number(r.transform.scale) << ','
        << format_number(rad2deg(r.transform.rotation)) << ','
        << format_number(r.transform.translation.x()) << ','
        << format_number(r.transform.translation.y()) << ',' << r.inliers
        << ',' << format_number(r.rms_px) << '\n';
}

std::vector<sync::LedEvent> read_led_events(
    const std::filesystem::path& file) {
  CsvFile csv(file);
  csv.expect_header("frame,utc_second");
  std::vector<sync::LedEvent> out;
  while (csv.next_row(2)) out.push_back({csv.get_long(0), csv.get_long(1)});
  return out;
}

void write_led_events(const std::filesystem::path& file,
                      const std::vector<sync::LedEvent>& events) {
  auto out = open_out(file);
  out << "frame,utc_second\n";
  for (const auto& e : events) out << e.frame << ',' << e.utc_second << '\n';
}

std::vector<measure::Measurement> read_measurements(
    const std::filesystem::path& file) {
  CsvFile csv(file);
  csv.expect_header("frame,x_m,y_m,yaw_deg,width_m,length_m,quality");
  std::vector<measure::Measurement> out;
  while (csv.next_row(7)) {
    measure::Measurement m;
    m.frame = csv.get_long(0);
    m.center = {csv.get_double(1), csv.get_double(2)};
    m.yaw = deg2rad(csv.get_double(3));
    m.est_width = csv.get_double(4);
    m.est_length = csv.get_double(5);
    m.quality = csv.get_bool01(6);
    out.push_back(m);
  }
  return out;
}

void write_measurements(const std::filesystem::path& file,
                        const std::vector<measure::Measurement>& rows) {
  auto out = open_out(file);
  out << "frame,x_m,y_m,yaw_deg,width_m,length_m,quality\n";
  for (const auto& m : rows)
    out << m.frame << ',' << format_number(m.center.x()) << ','
        << format_number(m.center.y()) << ',' << format_number(rad2deg(m.yaw))
        << ',' << format_number(m.est_width) << ','
        << format_number(m.est_length) << ',' << (m.quality ? 1 : 0) << '\n';
}

std::vector<filter::TrackPoint> read_state(
    const std::filesystem::path& file) {
  CsvFile csv(file);
  csv.expect_header(
      "t_utc_s,frame,x_m,y_m,vx_mps,vy_mps,ax_mps2,ay_mps2,yaw_deg,"
      "yawrate_degps,cog_deg,sideslip_deg,sideslip_valid");
  std::vector<filter::TrackPoint> out;
  while (csv.next_row(13)) {
    filter::TrackPoint p;
    p.state.t = csv.get_double(0);
    p.frame = csv.get_long(1);
    p.state.x[filter::kX] = csv.get_double(2);
    p.state.x[filter::kY] = csv.get_double(3);
    p.state.x[filter::kVx] = csv.get_double(4);
    p.state.x[filter::kVy] = csv.get_double(5);
    p.state.x[filter::kAx] = csv.get_double(6);
    p.state.x[filter::kAy] = csv.get_double(7);
    p.state.x[filter::kYaw] = deg2rad(csv.get_double(8));
    p.state.x[filter::kYawRate] = deg2rad(csv.get_double(9));
    p.derived.cog = deg2rad(csv.get_double(10));
    p.derived.sideslip = deg2rad(csv.get_double(11));
    p.derived.valid_sideslip = csv.get_bool01(12);
    p.derived.speed = p.state.speed();
    p.measured = true;
    out.push_back(p);
  }
  return out;
}

void write_state(const std::filesystem::path& file,
                 const std::vector<filter::TrackPoint>& points) {
  auto out = open_out(file);
  out << "t_utc_s,frame,x_m,y_m,vx_mps,vy_mps,ax_mps2,ay_mps2,yaw_deg,"
         "yawrate_degps,cog_deg,sideslip_deg,sideslip_valid\n";
  for (const auto& p : points) {
    const auto& x = p.state.x;
    out << format_number(p.state.t) << ',' << p.frame << ','
        << format_number(x[filter::kX]) << ',' << format_number(x[filter::kY])
        << ',' << format_number(x[filter::kVx]) << ','
        << format_number(x[filter::kVy]) << ','
        << format_number(x[filter::kAx]) << ','
        << format_number(x[filter::kAy]) << ','
        << format_number(rad2deg(x[filter::kYaw])) << ','
        << format_number(rad2deg(x[filter::kYawRate])) << ','
        << format_number(rad2deg(p.derived.cog)) << ','
        << format_number(rad2deg(p.derived.sideslip)) << ','
        << (p.derived.valid_sideslip ? 1 : 0) << '\n';
  }
}

std::vector<bench::ReferenceSample> read_reference(
    const std::filesystem::path& file) {
  CsvFile csv(file);
  csv.expect_header(
      "t_utc_s,x_m,y_m,v_mps,a_mps2,yaw_deg,sideslip_deg,cog_deg");
  std::vector<bench::ReferenceSample> out;
  while (csv.next_row(8)) {
    bench::ReferenceSample s;
    s.t = csv.get_double(0);
    s.pos = {csv.get_double(1), csv.get_double(2)};
    s.v_over_ground = csv.get_double(3);
    s.a_over_ground = csv.get_double(4);
    s.yaw = deg2rad(csv.get_double(5));
    s.sideslip = deg2rad(csv.get_double(6));
    s.cog = deg2rad(csv.get_double(7));
    out.push_back(s);
  }
  return out;
}

void write_reference(const std::filesystem::path& file,
                     const std::vector<bench::ReferenceSample>& trace) {
  auto out = open_out(file);
  out << "t_utc_s,x_m,y_m,v_mps,a_mps2,yaw_deg,sideslip_deg,cog_deg\n";
  for (const auto& s : trace)
    out << format_number(s.t) << ',' << format_number(s.pos.x()) << ','
        << format_number(s.pos.y()) << ',' << format_number(s.v_over_ground)
        << ',' << format_number(s.a_over_ground) << ','
        << format_number(rad2deg(s.yaw)) << ','
        << format_number(rad2deg(s.sideslip)) << ','
        << format_number(rad2deg(s.cog)) << '\n';
}

}  // namespace uavtrack::io
