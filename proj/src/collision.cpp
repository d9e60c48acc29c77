#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <sstream>
#include <thread>

#include "hcb/error.hpp"
#include "hcb/experiments.hpp"

namespace hcb {

std::string to_string(CollisionClass c) {
  switch (c) {
    case CollisionClass::T: return "T";
    case CollisionClass::R: return "R";
    case CollisionClass::indeterminate: return "indeterminate";
  }
  return "indeterminate";
}

void CollisionThresholds::validate() const {
  if (!(tau_stat > 0.0 && tau_stat < 1.0) || !(theta_uniform > 0.0) || !(theta_wall > 0.0) ||
      !(theta_wall < std::numbers::pi) || !(eps_node > 0.0 && eps_node < 0.5)) {
    throw Error(ErrorCode::ParamDomain, "collision thresholds out of range");
  }
}

CollisionMonitor::CollisionMonitor(const ModelParams& params, CollisionThresholds thresholds,
                                   std::optional<Species> species)
    : params_(params), thresholds_(thresholds), species_(species) {
  thresholds_.validate();
}

void CollisionMonitor::observe(const LatticeState& state) {
  rate_delta_.resize(state.size());
  rate_phi_.resize(state.size());
  eom_rhs(state.delta, state.phi, params_, rate_delta_, rate_phi_);
  double m = 0.0;
  for (double r : rate_delta_) m = std::max(m, std::abs(r));
  const double rate = 0.5 * m;
  peak_rate_ = std::max(peak_rate_, rate);
  if (rate < best_rate_) {
    best_rate_ = rate;
    best_ = state;
  }
  for (double d : state.delta) {
    const double rho = density_of(d);
    max_rho_ = std::max(max_rho_, rho);
    min_rho_ = std::min(min_rho_, rho);
  }
  ++samples_;
}

CollisionReport CollisionMonitor::report() const {
  if (samples_ == 0) throw Error(ErrorCode::InvalidArgument, "collision monitor saw no states");
  CollisionReport r;
  r.collision_time = best_.time;
  r.min_density_rate = best_rate_;
  r.peak_density_rate = peak_rate_;
  r.phase_dispersion_at_collision = phase_dispersion(best_.phi);
  r.max_density = max_rho_;
  r.min_density = min_rho_;

  const std::vector<double> diffs = bond_phase_differences(best_.phi, params_.boundary);
  for (std::size_t j = 0; j < diffs.size(); ++j) {
    if (std::abs(std::abs(diffs[j]) - std::numbers::pi) < thresholds_.theta_wall) r.wall_sites.push_back(static_cast<int>(j));
  }

  const bool stationary = best_rate_ < thresholds_.tau_stat * peak_rate_;
  const bool antinode = max_rho_ >= 1.0 - thresholds_.eps_node;
  const bool node = min_rho_ <= thresholds_.eps_node;
  bool extremum = antinode || node;
  if (species_) extremum = *species_ == Species::bright ? antinode : node;

  if (stationary && r.wall_sites.empty() && r.phase_dispersion_at_collision < thresholds_.theta_uniform) {
    r.cls = CollisionClass::T;
  } else if (stationary && r.wall_sites.size() == 2 && extremum) {
    r.cls = CollisionClass::R;
  }
  return r;
}

CollisionReport classify_collision(const Trajectory& trajectory, const ModelParams& params,
                                   const CollisionThresholds& thresholds, std::optional<Species> species) {
  CollisionMonitor monitor(params, thresholds, species);
  for (std::size_t i = 0; i < trajectory.frames.size(); ++i) monitor.observe(trajectory.state_at(i));
  return monitor.report();
}

std::vector<SolitonSpec> collision_pair(Species species, double rho0, double vbar, const ModelParams& params,
                                        double separation_widths) {
  const double v = std::abs(vbar);
  const double sep = separation_widths * soliton_width(rho0, v, params).value;
  const double mid = 0.5 * params.L;
  return {{species, rho0, v, mid - 0.5 * sep}, {species, rho0, -v, mid + 0.5 * sep}};
}

namespace {

std::size_t step_count(double t0, const IntegratorConfig& c) {
  const double span = c.t_end - t0;
  return span > 0.0 ? static_cast<std::size_t>(std::llround(span / c.dt)) : 0;
}

double speed_of(const SolitonSpec& s, const ModelParams& params) {
  return std::abs(s.vbar) * sound_speed(s.rho0, params) * params.t;
}

IntegrityCheck compare(const SolitonFit& before, const SolitonFit& after, const LatticeState& final_state,
                       SolitonSpec spec, const ModelParams& params) {
  IntegrityCheck c;
  c.before = before;
  c.after = after;
  c.amplitude_change = std::abs(after.amplitude - before.amplitude) / before.amplitude;
  c.width_change = std::abs(after.width - before.width) / before.width;
  spec.center = after.center;
  c.residual = profile_residual(final_state, spec, params);
  return c;
}

// Pre/post shape comparison; every wave is refitted on the lattice.
std::vector<IntegrityCheck> integrity_checks(const LatticeState& initial, const LatticeState& final_state,
                                             std::span<const SolitonSpec> specs, const ModelParams& params) {
  std::vector<IntegrityCheck> out;
  double gap = 0.0;
  for (const SolitonSpec& s : specs) gap = std::max(gap, 4.0 * soliton_width(s.rho0, s.vbar, params).value);
  const bool same = std::all_of(specs.begin(), specs.end(), [&](const SolitonSpec& s) { return s.species == specs[0].species; });
  if (same) {
    const auto before = fit_solitons(initial, specs[0].rho0, specs[0].species, specs.size(), gap, params.boundary);
    const auto after = fit_solitons(final_state, specs[0].rho0, specs[0].species, specs.size(), gap, params.boundary);
    for (std::size_t i = 0; i < specs.size(); ++i) out.push_back(compare(before[i], after[i], final_state, specs[i], params));
  } else {
    for (const SolitonSpec& s : specs) {
      const auto before = fit_solitons(initial, s.rho0, s.species, 1, gap, params.boundary);
      const auto after = fit_solitons(final_state, s.rho0, s.species, 1, gap, params.boundary);
      out.push_back(compare(before[0], after[0], final_state, s, params));
    }
  }
  return out;
}

struct MonitoredRun {
  Trajectory trajectory;
  LatticeState final_state;
};

// Evolves with a stationarity sample every `stride` steps.
MonitoredRun monitored_evolve(const LatticeState& initial, const ModelParams& params, IntegratorConfig ic,
                              std::size_t stride, std::size_t target_frames, bool store,
                              const std::function<void(const LatticeState&)>& sample) {
  const std::size_t n_steps = step_count(initial.time, ic);
  ic.frame_stride = std::max<std::size_t>(1, n_steps / std::max<std::size_t>(1, target_frames));
  MonitoredRun run;
  run.final_state = initial;
  sample(initial);
  EvolveHooks hooks;
  hooks.store_frames = store;
  hooks.on_step = [&](const LatticeState& s, std::size_t n) {
    if (n % stride == 0) sample(s);
    if (n == n_steps) run.final_state = s;
  };
  run.trajectory = evolve(initial, params, ic, hooks);
  return run;
}

}  // namespace

CollisionRun run_collision(const SolitonSpec& a, const SolitonSpec& b, const ModelParams& params,
                           const CollisionConfig& config) {
  params.validate();
  config.thresholds.validate();
  a.validate();
  b.validate();
  if (!(a.vbar * b.vbar < 0.0)) throw Error(ErrorCode::InvalidArgument, "collision partners must move in opposite directions");
  if (config.monitor_stride == 0) throw Error(ErrorCode::ParamDomain, "monitor_stride must be >= 1");

  const SolitonSpec& right_mover = a.vbar > 0.0 ? a : b;
  const SolitonSpec& left_mover = a.vbar > 0.0 ? b : a;
  const double width = std::max(soliton_width(a.rho0, a.vbar, params).value, soliton_width(b.rho0, b.vbar, params).value);
  double gap = left_mover.center - right_mover.center;
  if (params.boundary == Boundary::periodic) gap -= params.L * std::floor(gap / params.L);
  double sep = std::abs(a.center - b.center);
  if (params.boundary == Boundary::periodic) sep = std::min(sep, params.L - sep);
  if (sep < kMinCollisionSeparationWidths * width) {
    std::ostringstream os;
    os << "initial separation " << sep << " is below " << kMinCollisionSeparationWidths << " widths ("
       << kMinCollisionSeparationWidths * width << " sites)";
    throw Error(ErrorCode::SeparationTooSmall, os.str());
  }
  if (!(gap > 0.0)) throw Error(ErrorCode::InvalidArgument, "the waves move apart on an open chain");

  const std::vector<SolitonSpec> specs{a, b};
  const LatticeState initial = build_state(specs, params).state;
  const double meeting = gap / (speed_of(a, params) + speed_of(b, params));

  IntegratorConfig ic = config.integrator;
  ic.t_end = std::max(ic.t_end, config.runtime_factor * meeting);

  std::optional<Species> hint;
  if (a.species == b.species) hint = a.species;
  CollisionMonitor monitor(params, config.thresholds, hint);
  MonitoredRun run = monitored_evolve(initial, params, ic, config.monitor_stride, config.target_frames,
                                      config.store_frames, [&](const LatticeState& s) { monitor.observe(s); });

  CollisionRun out;
  out.report = monitor.report();
  out.report.meeting_time = meeting;
  if (!(out.report.min_density_rate < config.thresholds.tau_stat * out.report.peak_density_rate)) {
    std::ostringstream os;
    os << "stationarity metric never fell below " << config.thresholds.tau_stat << " of its peak (minimum ratio "
       << out.report.min_density_rate / out.report.peak_density_rate << ")";
    throw Error(ErrorCode::NoCollisionDetected, os.str());
  }
  if (config.integrity) {
    try {
      out.report.integrity = integrity_checks(initial, run.final_state, specs, params);
      for (const IntegrityCheck& c : out.report.integrity) {
        out.report.integrity_residual = std::max(out.report.integrity_residual, c.residual);
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::TrackerLost) throw;
      out.report.integrity.clear();
      out.report.integrity_residual = std::numeric_limits<double>::infinity();
    }
  }
  out.trajectory = std::move(run.trajectory);
  return out;
}

int train_pair_lattice(double rho0, double vbar, const ModelParams& params) {
  const double period = 2.0 * std::numbers::pi * soliton_width(rho0, vbar, params).value;
  const long m = std::max(1L, std::lround(0.5 * params.L / period));
  return 2 * static_cast<int>(std::lround(m * period));
}

CollisionRun run_train_collision(double rho0, double vbar, const ModelParams& params, const CollisionConfig& config) {
  ModelParams p = params;
  p.boundary = Boundary::periodic;
  p.L = train_pair_lattice(rho0, vbar, params);
  p.validate();
  const LatticeState initial = train_pair_state(rho0, vbar, p).state;
  const double v = vbar * sound_speed(rho0, p) * p.t;
  const double meeting = p.L / (4.0 * v);

  IntegratorConfig ic = config.integrator;
  ic.t_end = std::max(ic.t_end, config.runtime_factor * meeting);
  const Species species = rho0 < 0.5 ? Species::bright : Species::dark;
  CollisionMonitor monitor(p, config.thresholds, species);
  MonitoredRun run = monitored_evolve(initial, p, ic, config.monitor_stride, config.target_frames, config.store_frames,
                                      [&](const LatticeState& s) { monitor.observe(s); });
  CollisionRun out;
  out.report = monitor.report();
  out.report.meeting_time = meeting;
  if (!(out.report.min_density_rate < config.thresholds.tau_stat * out.report.peak_density_rate)) {
    throw Error(ErrorCode::NoCollisionDetected, "train collision shows no stationary-density instant");
  }
  out.trajectory = std::move(run.trajectory);
  return out;
}

InterspeciesRun run_interspecies(double vbar, const ModelParams& params, const InterspeciesConfig& config) {
  params.validate();
  const double v = std::abs(vbar);
  const double width = soliton_width(0.5, v, params).value;
  const double sep = config.separation_widths * width;
  if (sep < kMinCollisionSeparationWidths * width) throw Error(ErrorCode::SeparationTooSmall, "interspecies separation below 10 widths");
  const double mid = 0.5 * params.L;
  const std::vector<SolitonSpec> specs{{Species::bright, 0.5, v, mid - 0.5 * sep}, {Species::dark, 0.5, -v, mid + 0.5 * sep}};
  const LatticeState initial = build_state(specs, params).state;
  const double meeting = sep / (2.0 * speed_of(specs[0], params));

  IntegratorConfig ic = config.integrator;
  ic.t_end = std::max(ic.t_end, config.runtime_factor * meeting);

  std::vector<double> rd(params.L), rp(params.L);
  LatticeState best;
  double best_rate = std::numeric_limits<double>::infinity();
  double peak = 0.0;
  std::size_t samples = 0;
  std::size_t best_index = 0;
  auto sample = [&](const LatticeState& s) {
    eom_rhs(s.delta, s.phi, params, rd, rp);
    double m = 0.0;
    for (double x : rp) m = std::max(m, std::abs(x));
    peak = std::max(peak, m);
    if (m < best_rate) {
      best_rate = m;
      best = s;
      best_index = samples;
    }
    ++samples;
  };
  MonitoredRun run = monitored_evolve(initial, params, ic, config.monitor_stride, config.target_frames, true, sample);

  if (best_index == 0 || best_index + 1 >= samples || !(best_rate < config.stationarity * peak)) {
    std::ostringstream os;
    os << "no interior stationary-phase instant (minimum " << best_rate << ", peak " << peak << ")";
    throw Error(ErrorCode::NoCollisionDetected, os.str());
  }

  InterspeciesRun out;
  InterspeciesReport& r = out.report;
  r.meeting_time = meeting;
  r.stationary_time = best.time;
  r.min_phase_rate = best_rate;
  r.peak_phase_rate = peak;
  for (double d : best.delta) r.max_density_deviation = std::max(r.max_density_deviation, std::abs(density_of(d) - 0.5));
  r.jump_before = net_phase_jump(initial.phi);
  r.jump_during = net_phase_jump(best.phi);
  r.jump_after = net_phase_jump(run.final_state.phi);
  r.jump_drift = std::max(std::abs(r.jump_during - r.jump_before), std::abs(r.jump_after - r.jump_before)) /
                 std::abs(r.jump_before);

  const Trajectory& tr = run.trajectory;
  const double pre_end = 0.5 * r.stationary_time;
  const double post_start = r.stationary_time + 0.5 * (ic.t_end - r.stationary_time);
  LatticeState post_first;
  for (const Frame& f : tr.frames) {
    if (f.time >= post_start) {
      post_first = LatticeState(f.delta.size());
      post_first.delta = f.delta;
      break;
    }
  }
  for (int k = 0; k < 2; ++k) {
    const SolitonSpec& s = specs[k];
    TrackerSpec pre{s.species, 0.5, s.center};
    r.speed_before[k] = measure_soliton_speed(tr, pre, params.boundary, 0.0, pre_end);
    const SolitonFit start = fit_solitons(post_first, 0.5, s.species, 1, 0.0, params.boundary)[0];
    TrackerSpec post{s.species, 0.5, start.center};
    r.speed_after[k] = measure_soliton_speed(tr, post, params.boundary, post_start);
    const SolitonFit before = fit_solitons(initial, 0.5, s.species, 1, 0.0, params.boundary)[0];
    const SolitonFit after = fit_solitons(run.final_state, 0.5, s.species, 1, 0.0, params.boundary)[0];
    r.integrity[k] = compare(before, after, run.final_state, s, params);
  }
  out.trajectory = std::move(run.trajectory);
  return out;
}

CollisionClass classify_point(Species species, double rho0, double vbar, const ModelParams& params,
                              const SweepConfig& config) {
  CollisionConfig c = config.collision;
  c.store_frames = false;
  c.integrity = false;
  if (vbar > 1.0) return run_train_collision(rho0, vbar, params, c).report.cls;
  const auto specs = collision_pair(species, rho0, vbar, params, config.separation_widths);
  return run_collision(specs[0], specs[1], params, c).report.cls;
}

Threshold find_threshold(Species species, double rho0, const ModelParams& params, const SweepConfig& config) {
  Threshold th;
  th.rho0 = rho0;
  double lo = config.bisect_lower;
  double hi = config.bisect_upper;
  try {
    const CollisionClass at_lo = classify_point(species, rho0, lo, params, config);
    const CollisionClass at_hi = classify_point(species, rho0, hi, params, config);
    if (at_lo != CollisionClass::R || at_hi != CollisionClass::T) {
      std::ostringstream os;
      os << "no R/T bracket: " << to_string(at_lo) << " at " << lo << ", " << to_string(at_hi) << " at " << hi;
      th.reason = os.str();
      th.lower = lo;
      th.upper = hi;
      return th;
    }
    while (hi - lo > config.bisect_tolerance) {
      const double mid = 0.5 * (lo + hi);
      const CollisionClass c = classify_point(species, rho0, mid, params, config);
      if (c == CollisionClass::T) {
        hi = mid;
      } else if (c == CollisionClass::R) {
        lo = mid;
      } else {
        std::ostringstream os;
        os << "indeterminate class at vbar = " << mid;
        th.reason = os.str();
        th.lower = lo;
        th.upper = hi;
        return th;
      }
    }
    th.found = true;
  } catch (const Error& e) {
    th.reason = e.what();
  }
  th.lower = lo;
  th.upper = hi;
  return th;
}

namespace {

template <class Task>
void run_parallel(std::size_t n, unsigned workers, Task&& task) {
  const unsigned w = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(n)));
  if (w <= 1) {
    for (std::size_t i = 0; i < n; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned k = 0; k < w; ++k) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) task(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace

PhaseDiagramGrid sweep_phase_diagram(std::span<const double> rho0_grid, std::span<const double> vbar_grid,
                                     Species species, const ModelParams& params, const SweepConfig& config) {
  params.validate();
  PhaseDiagramGrid grid;
  grid.species = species;
  grid.rho0_axis.assign(rho0_grid.begin(), rho0_grid.end());
  grid.vbar_axis.assign(vbar_grid.begin(), vbar_grid.end());
  grid.labels.assign(rho0_grid.size(), std::vector<GridPoint>(vbar_grid.size()));
  for (double r : rho0_grid) {
    try {
      grid.sound_speed_curve.push_back(sound_speed(r, params) * params.t);
    } catch (const Error&) {
      grid.sound_speed_curve.push_back(std::numeric_limits<double>::quiet_NaN());
    }
  }

  const std::size_t nv = vbar_grid.size();
  run_parallel(rho0_grid.size() * nv, config.workers, [&](std::size_t k) {
    GridPoint& g = grid.labels[k / nv][k % nv];
    try {
      g.cls = classify_point(species, rho0_grid[k / nv], vbar_grid[k % nv], params, config);
    } catch (const Error& e) {
      g.failed = true;
      g.reason = std::string(to_string(e.code())) + ": " + e.what();
    }
  });
  if (config.bisect) {
    grid.thresholds.resize(rho0_grid.size());
    run_parallel(rho0_grid.size(), config.workers, [&](std::size_t i) {
      grid.thresholds[i] = find_threshold(species, rho0_grid[i], params, config);
    });
  }
  return grid;
}

}  // namespace hcb
