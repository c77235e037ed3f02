#include "uavtrack/bench.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "uavtrack/io.hpp"

namespace uavtrack::bench {

namespace {

double lerp_angle(double a, double b, double frac) {
  return wrap_angle(a + frac * wrap_angle(b - a));
}

VariableStats make_stats(std::vector<double> errors) {
  VariableStats st;
  st.count = errors.size();
  if (errors.empty()) return st;
  double sum = 0.0, sq = 0.0;
  for (double e : errors) {
    sum += e;
    sq += e * e;
    st.max = std::max(st.max, e);
  }
  st.mean_abs = sum / static_cast<double>(errors.size());
  st.rmse = std::sqrt(sq / static_cast<double>(errors.size()));

  std::sort(errors.begin(), errors.end());
  const double n = static_cast<double>(errors.size());
  for (std::size_t i = 0; i < errors.size(); ++i) {
    const double frac = static_cast<double>(i + 1) / n;
    if (!st.cumulative.empty() && st.cumulative.back().first == errors[i])
      st.cumulative.back().second = frac;
    else
      st.cumulative.emplace_back(errors[i], frac);
  }
  return st;
}

void write_dat(const std::filesystem::path& file, const VariableStats& st) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw Error("cannot open " + file.string() + " for writing");
  out << "error percent\n";
  for (const auto& [value, frac] : st.cumulative)
    out << io::format_number(value) << ' ' << io::format_number(frac)
        << '\n';
}

}  // namespace

std::vector<ReferenceSample> resample_reference(
    const std::vector<ReferenceSample>& trace,
    const std::vector<double>& times) {
  if (trace.empty()) throw OutOfSpan("reference trace is empty");
  std::vector<ReferenceSample> out;
  out.reserve(times.size());
  for (double t : times) {
    if (t < trace.front().t || t > trace.back().t)
      throw OutOfSpan("query time " + std::to_string(t) +
                      " outside reference span [" +
                      std::to_string(trace.front().t) + ", " +
                      std::to_string(trace.back().t) + "]");
    const auto upper = std::lower_bound(
        trace.begin(), trace.end(), t,
        [](const ReferenceSample& s, double value) { return s.t < value; });
    if (upper == trace.begin()) {
      out.push_back(trace.front());
      continue;
    }
    const auto& hi = *upper;
    const auto& lo = *(upper - 1);
    if (hi.t == t) {
      out.push_back(hi);
      continue;
    }
    const double frac = (t - lo.t) / (hi.t - lo.t);
    ReferenceSample s;
    s.t = t;
    s.pos = lo.pos + frac * (hi.pos - lo.pos);
    s.v_over_ground =
        lo.v_over_ground + frac * (hi.v_over_ground - lo.v_over_ground);
    s.a_over_ground =
        lo.a_over_ground + frac * (hi.a_over_ground - lo.a_over_ground);
    s.yaw = lerp_angle(lo.yaw, hi.yaw, frac);
    s.sideslip = lerp_angle(lo.sideslip, hi.sideslip, frac);
    s.cog = lerp_angle(lo.cog, hi.cog, frac);
    out.push_back(s);
  }
  return out;
}

BenchReport compare(const std::vector<filter::TrackPoint>& est,
                    const std::vector<ReferenceSample>& ref) {
  if (est.size() != ref.size())
    throw LengthMismatch("estimate has " + std::to_string(est.size()) +
                         " samples, reference has " +
                         std::to_string(ref.size()));

  std::vector<double> e_pos, e_vel, e_acc, e_yaw, e_slip, e_cog;
  e_pos.reserve(est.size());
  for (std::size_t i = 0; i < est.size(); ++i) {
    const auto& s = est[i].state;
    const auto& d = est[i].derived;
    const auto& r = ref[i];
    e_pos.push_back((s.position() - r.pos).norm());
    e_vel.push_back(std::abs(s.speed() - r.v_over_ground));
    e_acc.push_back(std::abs(s.acceleration().norm() - r.a_over_ground));
    e_yaw.push_back(rad2deg(angular_distance(s.yaw(), r.yaw)));
    e_cog.push_back(rad2deg(angular_distance(d.cog, r.cog)));
    if (d.valid_sideslip)
      e_slip.push_back(rad2deg(angular_distance(d.sideslip, r.sideslip)));
  }

  BenchReport report;
  report.position = make_stats(std::move(e_pos));
  report.velocity = make_stats(std::move(e_vel));
  report.acceleration = make_stats(std::move(e_acc));
  report.yaw = make_stats(std::move(e_yaw));
  report.sideslip = make_stats(std::move(e_slip));
  report.cog = make_stats(std::move(e_cog));
  return report;
}

void emit_plotdata(const BenchReport& report,
                   const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  write_dat(out_dir / "position.dat", report.position);
  write_dat(out_dir / "velocity.dat", report.velocity);
  write_dat(out_dir / "acceleration.dat", report.acceleration);
  write_dat(out_dir / "yaw.dat", report.yaw);
  write_dat(out_dir / "sideslip.dat", report.sideslip);
  write_dat(out_dir / "cog.dat", report.cog);
}

}  // namespace uavtrack::bench
