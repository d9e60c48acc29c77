#pragma once

// Numerical experiments: soliton collisions and their T/R signature,
// interspecies annihilation at half filling, collision phase diagrams,
// supersonic train collisions and imprinted breathers.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hcb/integrator.hpp"
#include "hcb/lattice.hpp"
#include "hcb/soliton.hpp"

namespace hcb {

// ---- soliton measurements ------------------------------------------------

struct SolitonFit {
  double center = 0.0;     // sub-site position of the extremum
  double amplitude = 0.0;  // |rho - rho0| at the extremum
  double width = 0.0;      // full width at half maximum, sites
};

// The `count` strongest extrema of the given species (maxima of rho - rho0 for
// bright, of rho0 - rho for dark), at least min_separation sites apart.
// Throws TrackerLost if fewer are found. Results are sorted by position.
std::vector<SolitonFit> fit_solitons(const LatticeState& state, double rho0, Species species,
                                     std::size_t count, double min_separation, Boundary boundary);

// Relative L2 mismatch sqrt(sum (f_meas - f)^2 / sum f^2) between the measured density
// deviation and the analytic profile of `spec` centred at spec.center, over
// |z| <= window_widths * Gamma.
double profile_residual(const LatticeState& state, const SolitonSpec& spec, const ModelParams& params,
                        double window_widths = 8.0);

struct TrackerSpec {
  Species species = Species::bright;
  double rho0 = 0.45;
  double start = 0.0;                   // position at the first observed frame
  double search_radius = 4.0;           // sites searched around the last position
  double min_amplitude_fraction = 0.5;  // of the first observed amplitude
};

// Follows one density extremum frame by frame with three-point parabolic
// refinement. Throws TrackerLost when the extremum leaves the search window,
// touches its edge or fades below the amplitude floor.
class ExtremumTracker {
 public:
  ExtremumTracker(const TrackerSpec& spec, std::size_t L, Boundary boundary);

  void observe(double time, std::span<const double> delta);

  // Least-squares slope of position against time, sites per unit time.
  double speed() const;
  const std::vector<double>& times() const noexcept { return times_; }
  const std::vector<double>& positions() const noexcept { return positions_; }  // unwrapped

 private:
  TrackerSpec spec_;
  std::size_t L_;
  Boundary boundary_;
  double reference_amplitude_ = 0.0;
  std::vector<double> times_;
  std::vector<double> positions_;
};

// Speed of one tracked extremum over frames with t_from <= time <= t_to.
double measure_soliton_speed(const Trajectory& trajectory, const TrackerSpec& tracker, Boundary boundary,
                             double t_from = -std::numeric_limits<double>::infinity(),
                             double t_to = std::numeric_limits<double>::infinity());

// ---- collisions ----------------------------------------------------------

enum class CollisionClass { T, R, indeterminate };
std::string to_string(CollisionClass c);

struct CollisionThresholds {
  // Stationarity threshold relative to the run's peak of max_j |rho_dot_j|.
  double tau_stat = 0.1;
  double theta_uniform = 0.05;  // circular phase dispersion, rad
  double theta_wall = 0.3;      // allowed distance of a wall jump from pi
  double eps_node = 0.01;       // hard-core extremum tolerance

  void validate() const;
  bool operator==(const CollisionThresholds&) const = default;
};

struct IntegrityCheck {
  SolitonFit before;
  SolitonFit after;
  double amplitude_change = 0.0;  // relative
  double width_change = 0.0;      // relative
  double residual = 0.0;          // profile_residual after the collision
};

struct CollisionReport {
  double collision_time = 0.0;
  CollisionClass cls = CollisionClass::indeterminate;
  double min_density_rate = 0.0;   // min over samples of max_j |rho_dot_j|
  double peak_density_rate = 0.0;  // max over samples of the same
  double phase_dispersion_at_collision = 0.0;
  std::vector<int> wall_sites;  // bond j joins sites j and j+1
  double max_density = 0.0;     // extremal densities reached during the run
  double min_density = 1.0;
  double integrity_residual = 0.0;  // worst per-soliton residual
  std::vector<IntegrityCheck> integrity;
  double meeting_time = 0.0;
};

// Streaming stationarity tracker: feed it states, it keeps the most
// stationary one and the run's extremes.
class CollisionMonitor {
 public:
  CollisionMonitor(const ModelParams& params, CollisionThresholds thresholds,
                   std::optional<Species> species = std::nullopt);

  void observe(const LatticeState& state);
  std::size_t samples() const noexcept { return samples_; }

  // Classifies the most stationary state seen so far.
  CollisionReport report() const;

 private:
  ModelParams params_;
  CollisionThresholds thresholds_;
  std::optional<Species> species_;
  std::vector<double> rate_delta_;
  std::vector<double> rate_phi_;
  LatticeState best_;
  double best_rate_ = std::numeric_limits<double>::infinity();
  double peak_rate_ = 0.0;
  double max_rho_ = 0.0;
  double min_rho_ = 1.0;
  std::size_t samples_ = 0;
};

// Classification of a recorded trajectory from its frames.
CollisionReport classify_collision(const Trajectory& trajectory, const ModelParams& params,
                                   const CollisionThresholds& thresholds = {},
                                   std::optional<Species> species = std::nullopt);

struct CollisionConfig {
  IntegratorConfig integrator;  // t_end is raised to runtime_factor * meeting time
  double runtime_factor = 2.0;
  std::size_t monitor_stride = 4;  // steps between stationarity samples
  std::size_t target_frames = 400;  // frame_stride is chosen to give about this many
  bool store_frames = true;
  bool integrity = true;
  CollisionThresholds thresholds;
};

// Minimum initial separation for a collision run, in widths.
inline constexpr double kMinCollisionSeparationWidths = 10.0;

// Two equal-species waves at rho0 placed symmetrically about L/2, the left one
// moving right at +vbar and the right one moving left.
std::vector<SolitonSpec> collision_pair(Species species, double rho0, double vbar, const ModelParams& params,
                                        double separation_widths = 12.0);

struct CollisionRun {
  Trajectory trajectory;
  CollisionReport report;
};

// Throws SeparationTooSmall, InvalidArgument for equal velocity signs, and
// NoCollisionDetected if the stationarity metric never falls below tau_stat.
CollisionRun run_collision(const SolitonSpec& a, const SolitonSpec& b, const ModelParams& params,
                           const CollisionConfig& config = {});

// Counter-propagating supersonic trains, one per half lattice (periodic).
// The run covers one full interpenetration, L / (2 v).
CollisionRun run_train_collision(double rho0, double vbar, const ModelParams& params,
                                 const CollisionConfig& config = {});

// Even lattice size close to params.L holding an integer number of train
// periods per half.
int train_pair_lattice(double rho0, double vbar, const ModelParams& params);

// ---- interspecies collisions ---------------------------------------------

struct InterspeciesConfig {
  IntegratorConfig integrator;
  double separation_widths = 12.0;
  double runtime_factor = 2.0;
  std::size_t monitor_stride = 4;
  std::size_t target_frames = 400;
  // The phase-rate minimum must fall below this fraction of its peak.
  double stationarity = 0.1;
};

struct InterspeciesReport {
  double meeting_time = 0.0;
  double stationary_time = 0.0;
  double min_phase_rate = 0.0;   // max_j |phi_dot_j| at the stationary instant
  double peak_phase_rate = 0.0;
  double max_density_deviation = 0.0;  // max_j |rho_j - 1/2| at that instant
  double jump_before = 0.0;
  double jump_during = 0.0;
  double jump_after = 0.0;
  double jump_drift = 0.0;  // max relative change from jump_before
  double speed_before[2] = {0.0, 0.0};  // bright, dark (sites per unit time)
  double speed_after[2] = {0.0, 0.0};
  IntegrityCheck integrity[2];  // bright, dark
};

struct InterspeciesRun {
  Trajectory trajectory;
  InterspeciesReport report;
};

// Bright wave moving right and dark wave moving left at half filling. Runs on
// whatever boundary params carries; an open chain avoids the winding mismatch
// of the pair. Throws NoCollisionDetected.
InterspeciesRun run_interspecies(double vbar, const ModelParams& params, const InterspeciesConfig& config = {});

// ---- phase diagram ---------------------------------------------------------

struct GridPoint {
  CollisionClass cls = CollisionClass::indeterminate;
  bool failed = false;
  std::string reason;
};

struct Threshold {
  double rho0 = 0.0;
  bool found = false;
  double lower = 0.0;  // highest speed seen repelling
  double upper = 0.0;  // lowest speed seen transmitting
  std::string reason;

  double value() const noexcept { return 0.5 * (lower + upper); }
};

struct PhaseDiagramGrid {
  Species species = Species::bright;
  std::vector<double> rho0_axis;
  std::vector<double> vbar_axis;
  std::vector<std::vector<GridPoint>> labels;  // [rho0 index][vbar index]
  std::vector<double> sound_speed_curve;        // c_s at each rho0
  std::vector<Threshold> thresholds;            // per rho0, when bisection is requested
};

struct SweepConfig {
  CollisionConfig collision;
  double separation_widths = 12.0;
  bool bisect = false;
  double bisect_lower = 0.5;
  double bisect_upper = 0.95;
  double bisect_tolerance = 0.01;
  unsigned workers = 1;
};

// Collision class at one (rho0, vbar): a localized pair below the sound speed,
// a train pair above it.
CollisionClass classify_point(Species species, double rho0, double vbar, const ModelParams& params,
                              const SweepConfig& config);

// Brackets the R -> T speed by bisection to config.bisect_tolerance.
Threshold find_threshold(Species species, double rho0, const ModelParams& params, const SweepConfig& config);

PhaseDiagramGrid sweep_phase_diagram(std::span<const double> rho0_grid, std::span<const double> vbar_grid,
                                     Species species, const ModelParams& params, const SweepConfig& config);

// ---- breathers -----------------------------------------------------------

enum class BreatherVerdict { bound, dissociated };
std::string to_string(BreatherVerdict v);

struct BreatherMode {
  double center = 0.0;  // mean tracked position
  double speed = 0.0;   // sites per unit time; imprints can launch moving breathers
  int first_site = 0;   // range swept by the track
  int last_site = 0;
  double period_mean = 0.0;
  double period_std = 0.0;
  std::size_t cycles = 0;
};

struct BreatherReport {
  std::size_t count = 0;
  std::vector<double> centers;
  double period_mean = 0.0;  // of the longest-lived mode
  double period_std = 0.0;
  std::size_t cycles = 0;
  BreatherVerdict verdict = BreatherVerdict::bound;
  double extrema_separation = 0.0;  // bright-dark separation at the end
  std::vector<BreatherMode> modes;
};

// A breather is a bipolar cluster: sites above 1/2 + threshold and below
// 1/2 - threshold within one region. Clusters are linked from sample to sample
// into tracks; tracks that persist are breathers, and each one's period is
// timed from the density contrast in a window riding along with it.
struct BreatherConfig {
  IntegratorConfig integrator;
  double sample_interval = 0.1;
  double transient = 20.0;       // excluded from all statistics
  double noise_floor = 1e-8;     // absolute variance below which nothing oscillates
  double threshold = 0.25;       // |rho - 1/2| marking a cluster site
  double merge_gap_widths = 3.0;   // cluster sites closer than this are one region
  double link_radius_widths = 3.0; // cluster displacement allowed between samples
  double max_gap_time = 30.0;      // a track may vanish this long (breathing dips)
  double min_track_fraction = 0.5; // of the analysed time span
  double window_widths = 5.0;      // half-width of the co-moving contrast window
  // Radiation packets can be bipolar too, but they do not breathe regularly.
  double max_period_scatter = 0.25;  // period_std / period_mean
  double dissociation_widths = 10.0;
  // Optional uniform random phase kick in [-phase_noise, phase_noise] per
  // site after imprinting, drawn from a generator seeded with `seed`.
  double phase_noise = 0.0;
  std::uint64_t seed = 0;

  bool operator==(const BreatherConfig&) const = default;
};

struct BreatherRun {
  Trajectory trajectory;
  BreatherReport report;
};

// Imprints on a uniform half-filled lattice and evolves. Throws
// NoOscillationDetected if no site variance rises above the noise floor.
BreatherRun run_breather(const PhaseImprint& imprint, const ModelParams& params, const BreatherConfig& config);

// Analysis of a sampled density history rho[sample][site]; used by run_breather.
BreatherReport analyze_breather(const std::vector<double>& times, const std::vector<std::vector<double>>& rho,
                                const PhaseImprint& imprint, const BreatherConfig& config);

}  // namespace hcb
