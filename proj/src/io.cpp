#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "hcb/io.hpp"
#include "json.hpp"

namespace hcb {

namespace {

using nlohmann::ordered_json;

constexpr std::string_view kHeader = "time,site,rho,phi,rho_s";

void append(std::string& out, double v) {
  char buf[32];
  const int n = std::snprintf(buf, sizeof buf, "%.17g", v);
  out.append(buf, static_cast<std::size_t>(n));
}

[[noreturn]] void bad_format(std::size_t line, const std::string& what) {
  throw Error(ErrorCode::FormatViolation, "trajectory line " + std::to_string(line) + ": " + what);
}

double field(std::string_view s, std::size_t line) {
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) bad_format(line, "'" + std::string(s) + "' is not a number");
  return v;
}

}  // namespace

void write_trajectory(const Trajectory& trajectory, std::ostream& out) {
  std::string buf;
  buf.append(kHeader).push_back('\n');
  for (const Frame& f : trajectory.frames) {
    for (std::size_t j = 0; j < f.delta.size(); ++j) {
      const double rho = density_of(f.delta[j]);
      append(buf, f.time);
      buf += ',';
      buf += std::to_string(j);
      buf += ',';
      append(buf, rho);
      buf += ',';
      append(buf, f.phi[j]);
      buf += ',';
      append(buf, rho * (1.0 - rho));
      buf += '\n';
    }
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    buf.clear();
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw Error(ErrorCode::IoFailure, "trajectory write failed");
}

void write_trajectory(const Trajectory& trajectory, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot open " + path.string() + " for writing");
  write_trajectory(trajectory, out);
  out.close();
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
}

Trajectory read_trajectory(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) bad_format(1, "empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kHeader) bad_format(1, "header must be '" + std::string(kHeader) + "'");

  Trajectory tr;
  std::size_t line_no = 1;
  std::size_t width = 0;  // sites per frame, fixed by the first frame
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::string_view rest = line;
    std::string_view cols[5];
    for (int c = 0; c < 5; ++c) {
      const auto comma = rest.find(',');
      if ((c < 4) == (comma == std::string_view::npos)) bad_format(line_no, "expected 5 columns");
      cols[c] = rest.substr(0, comma);
      if (c < 4) rest.remove_prefix(comma + 1);
    }
    const double time = field(cols[0], line_no);
    std::size_t site = 0;
    {
      const auto [p, ec] = std::from_chars(cols[1].data(), cols[1].data() + cols[1].size(), site);
      if (ec != std::errc() || p != cols[1].data() + cols[1].size()) bad_format(line_no, "site is not an index");
    }
    const double rho = field(cols[2], line_no);
    const double phi = field(cols[3], line_no);
    field(cols[4], line_no);  // rho_s is derived; validated but not stored
    if (!(rho >= 0.0 && rho <= 1.0)) bad_format(line_no, "rho outside [0, 1]");

    if (site == 0) {
      if (!tr.frames.empty()) {
        if (width == 0) width = tr.frames.back().delta.size();
        if (tr.frames.back().delta.size() != width) bad_format(line_no, "frame has a different number of sites");
        if (!(time > tr.frames.back().time)) bad_format(line_no, "frame times must increase");
      }
      tr.frames.push_back({time, {}, {}});
    } else if (tr.frames.empty() || site != tr.frames.back().delta.size() || time != tr.frames.back().time) {
      bad_format(line_no, "sites must run 0, 1, ... within a frame of constant time");
    }
    tr.frames.back().delta.push_back(delta_of(rho));
    tr.frames.back().phi.push_back(phi);
  }
  if (tr.frames.empty()) bad_format(line_no, "no frames");
  if (width != 0 && tr.frames.back().delta.size() != width) bad_format(line_no, "last frame is truncated");
  return tr;
}

Trajectory read_trajectory(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot read " + path.string());
  return read_trajectory(in);
}

void write_text(const std::string& text, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot open " + path.string() + " for writing");
  out << text;
  out.close();
  if (!out) throw Error(ErrorCode::IoFailure, "cannot write " + path.string());
}

// ---- reports -------------------------------------------------------------------

namespace {

// Non-finite numbers have no JSON form; they are written as null.
ordered_json num(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

ordered_json header_json(const ExperimentConfig& c) {
  // The canonical config text, key by key, so defaults are visible.
  ordered_json h = ordered_json::object();
  std::istringstream in(to_text(c));
  std::string line, section;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.front() == '[') {
      section = line.substr(1, line.size() - 2);
      h[section] = ordered_json::object();
      continue;
    }
    const auto eq = line.find(" = ");
    const std::string value = line.substr(eq + 3);
    double x = 0.0;
    const auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), x);
    const bool number = ec == std::errc() && p == value.data() + value.size();
    h[section][line.substr(0, eq)] = number ? ordered_json(x) : ordered_json(value);
  }
  return h;
}

ordered_json envelope(std::string_view kind, const ExperimentConfig& c) {
  ordered_json j;
  j["schema"] = "hcb." + std::string(kind) + "/" + std::to_string(kSchemaVersion);
  j["header"] = header_json(c);
  return j;
}

ordered_json fit_json(const SolitonFit& f) {
  return {{"center", num(f.center)}, {"amplitude", num(f.amplitude)}, {"width", num(f.width)}};
}

ordered_json integrity_json(const IntegrityCheck& c) {
  return {{"before", fit_json(c.before)},
          {"after", fit_json(c.after)},
          {"amplitude_change", num(c.amplitude_change)},
          {"width_change", num(c.width_change)},
          {"residual", num(c.residual)}};
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

}  // namespace

std::string report_json(const PropagateReport& r, const ExperimentConfig& header) {
  ordered_json j = envelope("propagate", header);
  j["speed"] = num(r.speed);
  j["expected_speed"] = num(r.expected_speed);
  j["profile_residual"] = num(r.profile_residual);
  j["number_drift"] = num(r.number_drift);
  j["energy_drift"] = num(r.energy_drift);
  return dump(j);
}

std::string report_json(const CollisionReport& r, const ExperimentConfig& header) {
  ordered_json j = envelope(header.kind == ExperimentKind::train ? "train" : "collision", header);
  j["class"] = to_string(r.cls);
  j["collision_time"] = num(r.collision_time);
  j["meeting_time"] = num(r.meeting_time);
  j["min_density_rate"] = num(r.min_density_rate);
  j["peak_density_rate"] = num(r.peak_density_rate);
  j["phase_dispersion_at_collision"] = num(r.phase_dispersion_at_collision);
  j["wall_sites"] = r.wall_sites;
  j["max_density"] = num(r.max_density);
  j["min_density"] = num(r.min_density);
  j["integrity_residual"] = num(r.integrity_residual);
  j["integrity"] = ordered_json::array();
  for (const IntegrityCheck& c : r.integrity) j["integrity"].push_back(integrity_json(c));
  return dump(j);
}

std::string report_json(const InterspeciesReport& r, const ExperimentConfig& header) {
  ordered_json j = envelope("interspecies", header);
  j["meeting_time"] = num(r.meeting_time);
  j["stationary_time"] = num(r.stationary_time);
  j["min_phase_rate"] = num(r.min_phase_rate);
  j["peak_phase_rate"] = num(r.peak_phase_rate);
  j["max_density_deviation"] = num(r.max_density_deviation);
  j["jump_before"] = num(r.jump_before);
  j["jump_during"] = num(r.jump_during);
  j["jump_after"] = num(r.jump_after);
  j["jump_drift"] = num(r.jump_drift);
  j["speed_before"] = {{"bright", num(r.speed_before[0])}, {"dark", num(r.speed_before[1])}};
  j["speed_after"] = {{"bright", num(r.speed_after[0])}, {"dark", num(r.speed_after[1])}};
  j["integrity"] = {{"bright", integrity_json(r.integrity[0])}, {"dark", integrity_json(r.integrity[1])}};
  return dump(j);
}

std::string report_json(const PhaseDiagramGrid& g, const ExperimentConfig& header) {
  ordered_json j = envelope("phase_diagram", header);
  j["species"] = g.species == Species::bright ? "bright" : "dark";
  j["rho0_axis"] = g.rho0_axis;
  j["vbar_axis"] = g.vbar_axis;
  ordered_json labels = ordered_json::array();
  ordered_json failures = ordered_json::array();
  for (std::size_t i = 0; i < g.labels.size(); ++i) {
    ordered_json row = ordered_json::array();
    for (std::size_t k = 0; k < g.labels[i].size(); ++k) {
      const GridPoint& p = g.labels[i][k];
      row.push_back(p.failed ? "failed" : to_string(p.cls));
      if (p.failed) failures.push_back({{"rho0", g.rho0_axis[i]}, {"vbar", g.vbar_axis[k]}, {"reason", p.reason}});
    }
    labels.push_back(row);
  }
  j["labels"] = labels;
  j["failures"] = failures;
  j["sound_speed_curve"] = g.sound_speed_curve;
  j["thresholds"] = ordered_json::array();
  for (const Threshold& t : g.thresholds) {
    j["thresholds"].push_back({{"rho0", t.rho0},
                               {"found", t.found},
                               {"lower", num(t.lower)},
                               {"upper", num(t.upper)},
                               {"value", t.found ? num(t.value()) : ordered_json(nullptr)},
                               {"reason", t.reason}});
  }
  return dump(j);
}

std::string point_json(const GridPoint& p, double rho0, double vbar, const ExperimentConfig& header) {
  ordered_json j = envelope("phase_point", header);
  j["rho0"] = rho0;
  j["vbar"] = vbar;
  j["class"] = p.failed ? "failed" : to_string(p.cls);
  j["reason"] = p.reason;
  return dump(j);
}

std::string report_json(const BreatherReport& r, const ExperimentConfig& header) {
  ordered_json j = envelope("breather", header);
  j["count"] = r.count;
  j["centers"] = r.centers;
  j["period_mean"] = num(r.period_mean);
  j["period_std"] = num(r.period_std);
  j["cycles"] = r.cycles;
  j["verdict"] = to_string(r.verdict);
  j["extrema_separation"] = num(r.extrema_separation);
  j["modes"] = ordered_json::array();
  for (const BreatherMode& m : r.modes) {
    j["modes"].push_back({{"center", num(m.center)},
                          {"speed", num(m.speed)},
                          {"first_site", m.first_site},
                          {"last_site", m.last_site},
                          {"period_mean", num(m.period_mean)},
                          {"period_std", num(m.period_std)},
                          {"cycles", m.cycles}});
  }
  return dump(j);
}

std::string error_json(const std::exception& e) {
  ordered_json j;
  if (const auto* err = dynamic_cast<const Error*>(&e)) {
    j["error"] = std::string(to_string(err->code()));
  } else {
    j["error"] = "Internal";
  }
  j["message"] = e.what();
  if (const auto* ce = dynamic_cast<const ConfigError*>(&e)) {
    j["issues"] = ordered_json::array();
    for (const ConfigIssue& i : ce->issues()) {
      ordered_json o;
      o["code"] = std::string(to_string(i.code));
      o["key"] = i.key;
      if (i.code == ErrorCode::DomainViolation) {
        o["value"] = i.value;
        o["allowed"] = i.allowed;
      }
      if (i.line > 0) o["line"] = i.line;
      j["issues"].push_back(o);
    }
  }
  if (const auto* cb = dynamic_cast<const ConservationBreach*>(&e)) {
    j["quantity"] = cb->quantity();
    j["drift"] = num(cb->drift());
    j["time"] = num(cb->time());
  }
  return j.dump() + "\n";
}

}  // namespace hcb
