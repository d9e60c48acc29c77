#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <optional>
#include <sstream>

#include "hcb/io.hpp"

namespace hcb {

std::string to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::propagate: return "propagate";
    case ExperimentKind::collide: return "collide";
    case ExperimentKind::interspecies: return "interspecies";
    case ExperimentKind::sweep: return "sweep";
    case ExperimentKind::breathe: return "breathe";
    case ExperimentKind::train: return "train";
  }
  return "propagate";
}

std::string ConfigIssue::message() const {
  std::ostringstream os;
  if (line > 0) os << "line " << line << ": ";
  switch (code) {
    case ErrorCode::UnknownKey: os << "unknown key '" << key << "'"; break;
    case ErrorCode::MissingRequired: os << "missing required key '" << key << "'"; break;
    default: os << "'" << key << "' = " << value << " is outside " << allowed; break;
  }
  return os.str();
}

namespace {

std::string summary(const std::vector<ConfigIssue>& issues) {
  std::string s = "invalid configuration";
  for (const ConfigIssue& i : issues) s += "\n  " + i.message();
  return s;
}

}  // namespace

ConfigError::ConfigError(std::vector<ConfigIssue> issues)
    : Error(issues.empty() ? ErrorCode::InvalidArgument : issues.front().code, summary(issues)),
      issues_(std::move(issues)) {}

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::optional<double> to_double(std::string_view s) {
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<long long> to_integer(std::string_view s) {
  long long v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) return std::nullopt;
  return v;
}

// Shortest text that reads back to the same double.
std::string fmt(double v) {
  char buf[32];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

std::string fmt_list(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
  return s;
}

// A numeric interval; open ends are exclusive.
struct Range {
  double lo = -INFINITY;
  double hi = INFINITY;
  bool lo_open = true;
  bool hi_open = true;

  bool contains(double v) const {
    return (lo_open ? v > lo : v >= lo) && (hi_open ? v < hi : v <= hi);
  }
  std::string text() const {
    std::string s = lo_open ? "(" : "[";
    s += std::isinf(lo) ? "-inf" : fmt(lo);
    s += ", ";
    s += std::isinf(hi) ? "inf" : fmt(hi);
    s += hi_open ? ")" : "]";
    return s;
  }
};

constexpr Range positive{0.0, INFINITY, true, true};
constexpr Range non_negative{0.0, INFINITY, false, true};
constexpr Range unit_open{0.0, 1.0, true, true};

using Issues = std::vector<ConfigIssue>;

struct Key {
  std::string section;
  std::string name;
  // Parses and stores the value; returns the allowed-set text on failure.
  std::function<std::optional<std::string>(ExperimentConfig&, std::string_view)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

template <class Access>
Key real(std::string section, std::string name, Access access, Range range) {
  return {std::move(section), std::move(name),
          [=](ExperimentConfig& c, std::string_view v) -> std::optional<std::string> {
            const auto x = to_double(v);
            if (!x || !range.contains(*x)) return range.text();
            access(c) = *x;
            return std::nullopt;
          },
          [=](const ExperimentConfig& c) { return fmt(access(const_cast<ExperimentConfig&>(c))); }};
}

template <class T, class Access>
Key integer(std::string section, std::string name, Access access, long long lo, long long hi) {
  return {std::move(section), std::move(name),
          [=](ExperimentConfig& c, std::string_view v) -> std::optional<std::string> {
            const auto x = to_integer(v);
            if (!x || *x < lo || *x > hi) {
              return "integers in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]";
            }
            access(c) = static_cast<T>(*x);
            return std::nullopt;
          },
          [=](const ExperimentConfig& c) { return std::to_string(access(const_cast<ExperimentConfig&>(c))); }};
}

template <class Access>
Key list(std::string section, std::string name, Access access, Range range) {
  return {std::move(section), std::move(name),
          [=](ExperimentConfig& c, std::string_view v) -> std::optional<std::string> {
            std::vector<double> out;
            const std::string allowed = "comma-separated values in " + range.text();
            if (trim(v).empty()) {
              access(c) = out;
              return std::nullopt;
            }
            while (true) {
              const auto comma = v.find(',');
              const auto x = to_double(trim(v.substr(0, comma)));
              if (!x || !range.contains(*x)) return allowed;
              out.push_back(*x);
              if (comma == std::string_view::npos) break;
              v.remove_prefix(comma + 1);
            }
            access(c) = out;
            return std::nullopt;
          },
          [=](const ExperimentConfig& c) { return fmt_list(access(const_cast<ExperimentConfig&>(c))); }};
}

template <class E, class Access>
Key choice(std::string section, std::string name, Access access, std::vector<std::pair<std::string, E>> options) {
  std::string allowed = "{";
  for (std::size_t i = 0; i < options.size(); ++i) allowed += (i ? ", " : "") + options[i].first;
  allowed += "}";
  return {std::move(section), std::move(name),
          [=](ExperimentConfig& c, std::string_view v) -> std::optional<std::string> {
            for (const auto& [text, value] : options) {
              if (v == text) {
                access(c) = value;
                return std::nullopt;
              }
            }
            return allowed;
          },
          [=](const ExperimentConfig& c) {
            for (const auto& [text, value] : options) {
              if (access(const_cast<ExperimentConfig&>(c)) == value) return text;
            }
            return std::string();
          }};
}

template <class Access>
Key text(std::string section, std::string name, Access access) {
  return {std::move(section), std::move(name),
          [=](ExperimentConfig& c, std::string_view v) -> std::optional<std::string> {
            if (v.empty() || v.find_first_of("/\\") != std::string_view::npos) return "a plain file name";
            access(c) = std::string(v);
            return std::nullopt;
          },
          [=](const ExperimentConfig& c) { return access(const_cast<ExperimentConfig&>(c)); }};
}

#define FIELD(expr) [](ExperimentConfig& c) -> auto& { return c.expr; }

const std::vector<Key>& keys() {
  static const std::vector<Key> table = [] {
    std::vector<Key> k;
    k.push_back(choice<ExperimentKind>("experiment", "kind", FIELD(kind),
                                       {{"propagate", ExperimentKind::propagate},
                                        {"collide", ExperimentKind::collide},
                                        {"interspecies", ExperimentKind::interspecies},
                                        {"sweep", ExperimentKind::sweep},
                                        {"breathe", ExperimentKind::breathe},
                                        {"train", ExperimentKind::train}}));
    k.push_back(integer<std::uint64_t>("experiment", "seed", FIELD(seed), 0, 1LL << 62));
    k.push_back(text("experiment", "trajectory_file", FIELD(trajectory_file)));
    k.push_back(text("experiment", "report_file", FIELD(report_file)));

    k.push_back(integer<int>("model", "L", FIELD(model.L), 8, 1 << 24));
    k.push_back(real("model", "t", FIELD(model.t), positive));
    k.push_back(real("model", "V", FIELD(model.V), positive));  // upper bound t checked later
    k.push_back(choice<Boundary>("model", "boundary", FIELD(model.boundary),
                                 {{"periodic", Boundary::periodic}, {"open", Boundary::open}}));
    k.push_back(real("model", "mu_eff", FIELD(model.mu_eff), Range{}));

    k.push_back(real("integrator", "dt", FIELD(integrator.dt), Range{0.0, 0.05, true, false}));
    k.push_back(real("integrator", "t_end", FIELD(integrator.t_end), non_negative));
    k.push_back(integer<std::size_t>("integrator", "frame_stride", FIELD(integrator.frame_stride), 1, 1LL << 40));
    k.push_back(integer<std::size_t>("integrator", "check_stride", FIELD(integrator.check_stride), 1, 1LL << 40));
    k.push_back(real("integrator", "tol_number", FIELD(integrator.tolerances.number), positive));
    k.push_back(real("integrator", "tol_energy", FIELD(integrator.tolerances.energy), positive));

    k.push_back(choice<Species>("soliton", "species", FIELD(species),
                                {{"bright", Species::bright}, {"dark", Species::dark}}));
    k.push_back(real("soliton", "rho0", FIELD(rho0), unit_open));
    k.push_back(real("soliton", "vbar", FIELD(vbar), Range{}));
    k.push_back(real("soliton", "center", FIELD(center), Range{}));
    k.push_back(real("soliton", "separation_widths", FIELD(separation_widths),
                     Range{kMinCollisionSeparationWidths, INFINITY, false, true}));

    k.push_back(real("collision", "tau_stat", FIELD(thresholds.tau_stat), unit_open));
    k.push_back(real("collision", "theta_uniform", FIELD(thresholds.theta_uniform), positive));
    k.push_back(real("collision", "theta_wall", FIELD(thresholds.theta_wall), Range{0.0, std::numbers::pi, true, true}));
    k.push_back(real("collision", "eps_node", FIELD(thresholds.eps_node), Range{0.0, 0.5, true, true}));
    k.push_back(real("collision", "runtime_factor", FIELD(runtime_factor), Range{1.0, INFINITY, false, true}));
    k.push_back(integer<std::size_t>("collision", "monitor_stride", FIELD(monitor_stride), 1, 1LL << 30));
    k.push_back(integer<std::size_t>("collision", "target_frames", FIELD(target_frames), 1, 1LL << 30));

    k.push_back(list("sweep", "rho0_grid", FIELD(rho0_grid), unit_open));
    k.push_back(list("sweep", "vbar_grid", FIELD(vbar_grid), positive));
    k.push_back(choice<bool>("sweep", "bisect", FIELD(bisect), {{"false", false}, {"true", true}}));
    k.push_back(real("sweep", "bisect_lower", FIELD(bisect_lower), Range{0.0, 1.0, true, true}));
    k.push_back(real("sweep", "bisect_upper", FIELD(bisect_upper), Range{0.0, 1.0, true, true}));
    k.push_back(real("sweep", "bisect_tolerance", FIELD(bisect_tolerance), positive));
    k.push_back(integer<unsigned>("sweep", "workers", FIELD(workers), 1, 1024));

    k.push_back(integer<int>("breather", "n", FIELD(imprint.n), 0, 1 << 20));
    k.push_back(real("breather", "width", FIELD(imprint.width), positive));
    k.push_back(list("breather", "centers", FIELD(imprint.centers), Range{}));
    k.push_back(real("breather", "sample_interval", FIELD(breather.sample_interval), positive));
    k.push_back(real("breather", "transient", FIELD(breather.transient), non_negative));
    k.push_back(real("breather", "threshold", FIELD(breather.threshold), Range{0.0, 0.5, true, true}));
    k.push_back(real("breather", "phase_noise", FIELD(breather.phase_noise), non_negative));
    k.push_back(real("breather", "dissociation_widths", FIELD(breather.dissociation_widths), positive));
    return k;
  }();
  return table;
}

#undef FIELD

const Key* find_key(std::string_view name) {
  for (const Key& k : keys()) {
    if (k.name == name) return &k;
  }
  return nullptr;
}

bool known_section(std::string_view s) {
  for (const Key& k : keys()) {
    if (k.section == s) return true;
  }
  return false;
}

// Keys each experiment cannot run without.
std::vector<std::string> required_for(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::propagate: return {"rho0", "vbar", "t_end"};
    case ExperimentKind::collide: return {"rho0", "vbar"};
    case ExperimentKind::interspecies: return {"vbar"};
    case ExperimentKind::sweep: return {"rho0_grid", "vbar_grid"};
    case ExperimentKind::breathe: return {"n", "width", "t_end"};
    case ExperimentKind::train: return {"rho0", "vbar"};
  }
  return {};
}

}  // namespace

ExperimentConfig parse_config(std::string_view input) {
  ExperimentConfig c;
  Issues issues;
  std::vector<std::string> seen;
  std::string section;
  int line_no = 0;
  int kind_line = 0;

  while (!input.empty()) {
    const auto nl = input.find('\n');
    std::string_view line = input.substr(0, nl);
    input = nl == std::string_view::npos ? std::string_view{} : input.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') {
        issues.push_back({ErrorCode::UnknownKey, std::string(line), "", "", line_no});
        continue;
      }
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (!known_section(section)) issues.push_back({ErrorCode::UnknownKey, "[" + section + "]", "", "", line_no});
      continue;
    }

    const auto eq = line.find('=');
    const std::string name(trim(line.substr(0, eq)));
    const std::string_view value = eq == std::string_view::npos ? std::string_view{} : trim(line.substr(eq + 1));
    const Key* key = find_key(name);
    if (eq == std::string_view::npos || key == nullptr || (!section.empty() && key->section != section)) {
      issues.push_back({ErrorCode::UnknownKey, section.empty() ? name : section + "." + name, std::string(value), "",
                        line_no});
      continue;
    }
    if (std::find(seen.begin(), seen.end(), name) != seen.end()) {
      issues.push_back({ErrorCode::DomainViolation, name, std::string(value), "a single assignment", line_no});
      continue;
    }
    seen.push_back(name);
    if (const auto allowed = key->set(c, value)) {
      issues.push_back({ErrorCode::DomainViolation, name, std::string(value), *allowed, line_no});
    } else if (name == "kind") {
      kind_line = line_no;
    }
  }

  auto has = [&](const std::string& k) { return std::find(seen.begin(), seen.end(), k) != seen.end(); };
  // Rules that tie fields together.
  if (has("V") && !(c.model.V < c.model.t)) {
    issues.push_back({ErrorCode::DomainViolation, "V", fmt(c.model.V), "(0, t)", 0});
  }
  if (c.imprint.n % 2 != 0) issues.push_back({ErrorCode::DomainViolation, "n", std::to_string(c.imprint.n), "even integers", 0});
  if (c.bisect && !(c.bisect_lower < c.bisect_upper)) {
    issues.push_back({ErrorCode::DomainViolation, "bisect_upper", fmt(c.bisect_upper), "(bisect_lower, 1)", 0});
  }
  if (kind_line > 0 && (c.kind == ExperimentKind::propagate || c.kind == ExperimentKind::collide) &&
      has("vbar") && !(std::abs(c.vbar) < 1.0)) {
    issues.push_back({ErrorCode::DomainViolation, "vbar", fmt(c.vbar), "(-1, 1)", 0});
  }
  if (kind_line > 0 && c.kind == ExperimentKind::train && has("vbar") && !(c.vbar > 1.0)) {
    issues.push_back({ErrorCode::DomainViolation, "vbar", fmt(c.vbar), "(1, 1/(2 sqrt(rho0 (1 - rho0))))", 0});
  }
  if (kind_line > 0 && c.kind == ExperimentKind::interspecies && has("vbar") && !(std::abs(c.vbar) < 1.0 && c.vbar != 0.0)) {
    issues.push_back({ErrorCode::DomainViolation, "vbar", fmt(c.vbar), "(-1, 0) or (0, 1)", 0});
  }

  if (!has("kind")) {
    issues.push_back({ErrorCode::MissingRequired, "kind", "", "", 0});
  } else if (kind_line > 0) {
    for (const std::string& k : required_for(c.kind)) {
      if (!has(k)) issues.push_back({ErrorCode::MissingRequired, k, "", "", 0});
    }
  }

  if (!issues.empty()) throw ConfigError(std::move(issues));
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot read config " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return parse_config(os.str());
}

std::string to_text(const ExperimentConfig& config) {
  std::string out;
  std::string section;
  for (const Key& k : keys()) {
    if (k.section != section) {
      section = k.section;
      out += (out.empty() ? "[" : "\n[") + section + "]\n";
    }
    out += k.name + " = " + k.get(config) + "\n";
  }
  return out;
}

CollisionConfig collision_config(const ExperimentConfig& c) {
  CollisionConfig cc;
  cc.integrator = c.integrator;
  cc.runtime_factor = c.runtime_factor;
  cc.monitor_stride = c.monitor_stride;
  cc.target_frames = c.target_frames;
  cc.thresholds = c.thresholds;
  return cc;
}

SweepConfig sweep_config(const ExperimentConfig& c) {
  SweepConfig s;
  s.collision = collision_config(c);
  s.separation_widths = c.separation_widths;
  s.bisect = c.bisect;
  s.bisect_lower = c.bisect_lower;
  s.bisect_upper = c.bisect_upper;
  s.bisect_tolerance = c.bisect_tolerance;
  s.workers = c.workers;
  return s;
}

BreatherConfig breather_config(const ExperimentConfig& c) {
  BreatherConfig b = c.breather;
  b.integrator = c.integrator;
  b.seed = c.seed;
  return b;
}

PhaseImprint imprint_for(const ExperimentConfig& c) {
  PhaseImprint im = c.imprint;
  if (im.centers.empty()) im.centers = {0.5 * c.model.L};
  return im;
}

}  // namespace hcb
