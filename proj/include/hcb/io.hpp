#pragma once

// Experiment configuration files, trajectory CSV and JSON reports.
//
// Config files are flat `key = value` lines, optionally grouped under
// [model], [integrator], [experiment], [soliton], [collision], [sweep] and
// [breather] headers. Key names are unique across sections, so a header is
// only a check that the key sits where it belongs. '#' starts a comment.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "hcb/error.hpp"
#include "hcb/experiments.hpp"

namespace hcb {

enum class ExperimentKind { propagate, collide, interspecies, sweep, breathe, train };
std::string to_string(ExperimentKind k);

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::propagate;
  ModelParams model;
  IntegratorConfig integrator;

  // [soliton]: propagate, collide, interspecies and train
  Species species = Species::bright;
  double rho0 = 0.45;
  double vbar = 0.5;
  double center = -1.0;  // propagate only; negative means L/2
  double separation_widths = 12.0;

  // [collision]
  CollisionThresholds thresholds;
  double runtime_factor = 2.0;
  std::size_t monitor_stride = 4;
  std::size_t target_frames = 400;

  // [sweep]
  std::vector<double> rho0_grid;
  std::vector<double> vbar_grid;
  bool bisect = false;
  double bisect_lower = 0.5;
  double bisect_upper = 0.95;
  double bisect_tolerance = 0.01;
  unsigned workers = 1;

  // [breather]
  PhaseImprint imprint;  // empty centers means L/2
  BreatherConfig breather;

  // [experiment]
  std::uint64_t seed = 0;
  std::string trajectory_file = "trajectory.csv";
  std::string report_file = "report.json";

  bool operator==(const ExperimentConfig&) const = default;
};

struct ConfigIssue {
  ErrorCode code = ErrorCode::InvalidArgument;  // UnknownKey, DomainViolation or MissingRequired
  std::string key;
  std::string value;
  std::string allowed;
  int line = 0;  // 0 when the issue is not tied to a line

  std::string message() const;
};

// Every issue found in a config, not just the first.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<ConfigIssue> issues);
  const std::vector<ConfigIssue>& issues() const noexcept { return issues_; }

 private:
  std::vector<ConfigIssue> issues_;
};

// Throws ConfigError listing every unknown key, domain violation and missing
// required key.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);  // also IoFailure

// Canonical text form holding every field; parse_config(to_text(c)) == c.
std::string to_text(const ExperimentConfig& config);

// Library configs assembled from an experiment config.
CollisionConfig collision_config(const ExperimentConfig& c);
SweepConfig sweep_config(const ExperimentConfig& c);
BreatherConfig breather_config(const ExperimentConfig& c);
PhaseImprint imprint_for(const ExperimentConfig& c);

// ---- trajectories ----------------------------------------------------------

// CSV with header `time,site,rho,phi,rho_s`, one row per frame and site,
// numbers with 17 significant digits. Throws IoFailure.
void write_trajectory(const Trajectory& trajectory, const std::filesystem::path& path);
void write_trajectory(const Trajectory& trajectory, std::ostream& out);

// Throws IoFailure, or FormatViolation for a malformed file.
Trajectory read_trajectory(const std::filesystem::path& path);
Trajectory read_trajectory(std::istream& in);

// ---- reports -----------------------------------------------------------------

inline constexpr int kSchemaVersion = 1;

// Serialized JSON text. Every report carries "schema" (e.g.
// "hcb.collision/1") and "header", the full effective configuration with
// defaults filled in.
struct PropagateReport {
  double speed = 0.0;           // measured, sites per unit time
  double expected_speed = 0.0;  // vbar * c_s * t
  double profile_residual = 0.0;
  double number_drift = 0.0;
  double energy_drift = 0.0;  // relative
};

std::string report_json(const PropagateReport& r, const ExperimentConfig& header);
std::string report_json(const CollisionReport& r, const ExperimentConfig& header);
std::string report_json(const InterspeciesReport& r, const ExperimentConfig& header);
std::string report_json(const PhaseDiagramGrid& g, const ExperimentConfig& header);
std::string report_json(const BreatherReport& r, const ExperimentConfig& header);
// One phase-diagram point, for the per-point files of a sweep.
std::string point_json(const GridPoint& p, double rho0, double vbar, const ExperimentConfig& header);

// Writes text to path. Throws IoFailure.
void write_text(const std::string& text, const std::filesystem::path& path);

// Machine-readable error document for the command line.
std::string error_json(const std::exception& e);

}  // namespace hcb
