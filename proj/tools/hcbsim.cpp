// hcbsim: runs one experiment from a config file and writes its trajectory
// CSV and JSON report into an output directory.
//
//   hcbsim collide --config configs/bright_transmit.cfg --out runs/fig1
//
// On failure a one-line JSON error document goes to stderr and the exit code
// is nonzero (1 for a failed run, 2 for a bad command line or config).

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "hcb/io.hpp"

namespace fs = std::filesystem;
using namespace hcb;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot read config " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// The subcommand names the experiment; a config may omit `kind` but must not
// contradict it.
ExperimentConfig config_for(ExperimentKind kind, const fs::path& path) {
  std::string text = read_file(path);
  ExperimentConfig c;
  try {
    c = parse_config(text);
  } catch (const ConfigError& e) {
    const auto& issues = e.issues();
    const bool only_kind = issues.size() >= 1 && std::any_of(issues.begin(), issues.end(), [](const ConfigIssue& i) {
      return i.code == ErrorCode::MissingRequired && i.key == "kind";
    });
    if (!only_kind) throw;
    c = parse_config(text + "\n[experiment]\nkind = " + to_string(kind) + "\n");
  }
  if (c.kind != kind) {
    ConfigIssue issue{ErrorCode::DomainViolation, "kind", to_string(c.kind), "{" + to_string(kind) + "}", 0};
    throw ConfigError({issue});
  }
  return c;
}

void write_outputs(const fs::path& out, const ExperimentConfig& c, const Trajectory* trajectory,
                   const std::string& report) {
  if (trajectory != nullptr) write_trajectory(*trajectory, out / c.trajectory_file);
  write_text(report, out / c.report_file);
}

double relative_energy_drift(const Trajectory& tr) {
  const double e0 = tr.diagnostics.front().energy;
  const double e1 = tr.diagnostics.back().energy;
  return std::abs(e1 - e0) / std::max(std::abs(e0), 1.0);
}

void propagate(const ExperimentConfig& c, const fs::path& out) {
  SolitonSpec spec{c.species, c.rho0, c.vbar, c.center < 0.0 ? 0.5 * c.model.L : c.center};
  const std::vector<SolitonSpec> specs{spec};
  const BuiltState built = build_state(specs, c.model);
  const Trajectory tr = evolve(built.state, c.model, c.integrator);

  PropagateReport r;
  r.expected_speed = c.vbar * sound_speed(c.rho0, c.model) * c.model.t;
  TrackerSpec ts{c.species, c.rho0, spec.center};
  r.speed = measure_soliton_speed(tr, ts, c.model.boundary);
  const LatticeState last = tr.state_at(tr.frames.size() - 1);
  spec.center = fit_solitons(last, c.rho0, c.species, 1, 0.0, c.model.boundary).front().center;
  r.profile_residual = profile_residual(last, spec, c.model);
  r.number_drift = std::abs(tr.diagnostics.back().particle_number - tr.diagnostics.front().particle_number);
  r.energy_drift = relative_energy_drift(tr);
  write_outputs(out, c, &tr, report_json(r, c));
}

void collide(const ExperimentConfig& c, const fs::path& out) {
  const auto specs = collision_pair(c.species, c.rho0, c.vbar, c.model, c.separation_widths);
  const CollisionRun run = run_collision(specs[0], specs[1], c.model, collision_config(c));
  write_outputs(out, c, &run.trajectory, report_json(run.report, c));
}

void interspecies(const ExperimentConfig& c, const fs::path& out) {
  InterspeciesConfig ic;
  ic.integrator = c.integrator;
  ic.separation_widths = c.separation_widths;
  ic.runtime_factor = c.runtime_factor;
  ic.monitor_stride = c.monitor_stride;
  ic.target_frames = c.target_frames;
  ic.stationarity = c.thresholds.tau_stat;
  const InterspeciesRun run = run_interspecies(c.vbar, c.model, ic);
  write_outputs(out, c, &run.trajectory, report_json(run.report, c));
}

void sweep(const ExperimentConfig& c, const fs::path& out) {
  const PhaseDiagramGrid g = sweep_phase_diagram(c.rho0_grid, c.vbar_grid, c.species, c.model, sweep_config(c));
  const fs::path points = out / "points";
  fs::create_directories(points);
  for (std::size_t i = 0; i < g.rho0_axis.size(); ++i) {
    for (std::size_t k = 0; k < g.vbar_axis.size(); ++k) {
      const std::string name = "point_" + std::to_string(i) + "_" + std::to_string(k) + ".json";
      write_text(point_json(g.labels[i][k], g.rho0_axis[i], g.vbar_axis[k], c), points / name);
    }
  }
  write_outputs(out, c, nullptr, report_json(g, c));
}

void breathe(const ExperimentConfig& c, const fs::path& out) {
  ModelParams p = c.model;
  const BreatherRun run = run_breather(imprint_for(c), p, breather_config(c));
  write_outputs(out, c, &run.trajectory, report_json(run.report, c));
}

void train(const ExperimentConfig& c, const fs::path& out) {
  const CollisionRun run = run_train_collision(c.rho0, c.vbar, c.model, collision_config(c));
  write_outputs(out, c, &run.trajectory, report_json(run.report, c));
}

int fail(const std::exception& e, int code) {
  std::cerr << error_json(e);
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mean-field hard-core boson soliton experiments"};
  app.require_subcommand(1);

  struct Command {
    ExperimentKind kind;
    void (*run)(const ExperimentConfig&, const fs::path&);
    std::string help;
  };
  const std::vector<Command> commands{
      {ExperimentKind::propagate, propagate, "evolve a single soliton"},
      {ExperimentKind::collide, collide, "collide two equal-species solitons and classify T/R"},
      {ExperimentKind::interspecies, interspecies, "bright-dark collision at half filling"},
      {ExperimentKind::sweep, sweep, "collision phase diagram over (rho0, vbar)"},
      {ExperimentKind::breathe, breathe, "phase-imprint breathers and analyse them"},
      {ExperimentKind::train, train, "collide two supersonic trains"},
  };

  fs::path config_path;
  fs::path out_dir;
  std::vector<CLI::App*> subs;
  for (const Command& cmd : commands) {
    CLI::App* sub = app.add_subcommand(to_string(cmd.kind), cmd.help);
    sub->add_option("--config", config_path, "experiment config file")->required();
    sub->add_option("--out", out_dir, "output directory (created if missing)")->required();
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(Error(ErrorCode::InvalidArgument, e.what()), 2);
  }

  for (std::size_t i = 0; i < commands.size(); ++i) {
    if (!subs[i]->parsed()) continue;
    ExperimentConfig config;
    try {
      config = config_for(commands[i].kind, config_path);
    } catch (const ConfigError& e) {
      return fail(e, 2);
    } catch (const std::exception& e) {
      return fail(e, 2);
    }
    try {
      fs::create_directories(out_dir);
      write_text(to_text(config), out_dir / "config.effective");
      commands[i].run(config, out_dir);
    } catch (const std::exception& e) {
      return fail(e, 1);
    }
  }
  return 0;
}
