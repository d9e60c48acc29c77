#include "hcb/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hcb/error.hpp"

namespace hcb {

void IntegratorConfig::validate() const {
  if (!(dt > 0.0) || dt > 0.05) {
    std::ostringstream os;
    os << "time step dt = " << dt << " must lie in (0, 0.05]";
    throw Error(ErrorCode::ParamDomain, os.str());
  }
  if (frame_stride == 0) throw Error(ErrorCode::ParamDomain, "frame_stride must be >= 1");
  if (check_stride == 0) throw Error(ErrorCode::ParamDomain, "check_stride must be >= 1");
  if (!(tolerances.number > 0.0) || !(tolerances.energy > 0.0)) {
    throw Error(ErrorCode::ParamDomain, "conservation tolerances must be positive");
  }
}

LatticeState Trajectory::state_at(std::size_t frame) const {
  LatticeState s;
  s.delta = frames.at(frame).delta;
  s.phi = frames.at(frame).phi;
  s.time = frames.at(frame).time;
  return s;
}

Rk4Stepper::Rk4Stepper(std::size_t L) : tmp_delta_(L), tmp_phi_(L) {
  for (int i = 0; i < 4; ++i) {
    k_delta_[i].resize(L);
    k_phi_[i].resize(L);
  }
}

void Rk4Stepper::step(LatticeState& state, const ModelParams& params, double dt) {
  const std::size_t L = state.size();
  auto& d = state.delta;
  auto& p = state.phi;

  regularized_ += eom_rhs(d, p, params, k_delta_[0], k_phi_[0]);
  static constexpr double stage[3] = {0.5, 0.5, 1.0};
  for (int s = 0; s < 3; ++s) {
    const double h = stage[s] * dt;
    for (std::size_t j = 0; j < L; ++j) {
      tmp_delta_[j] = d[j] + h * k_delta_[s][j];
      tmp_phi_[j] = p[j] + h * k_phi_[s][j];
    }
    regularized_ += eom_rhs(tmp_delta_, tmp_phi_, params, k_delta_[s + 1], k_phi_[s + 1]);
  }

  const double w = dt / 6.0;
  bool finite = true;
  for (std::size_t j = 0; j < L; ++j) {
    d[j] += w * (k_delta_[0][j] + 2.0 * k_delta_[1][j] + 2.0 * k_delta_[2][j] + k_delta_[3][j]);
    p[j] += w * (k_phi_[0][j] + 2.0 * k_phi_[1][j] + 2.0 * k_phi_[2][j] + k_phi_[3][j]);
    finite = finite && std::isfinite(d[j]) && std::isfinite(p[j]);
    d[j] = std::clamp(d[j], -kDeltaClamp, kDeltaClamp);
  }
  if (!finite) {
    std::ostringstream os;
    os << "non-finite state after step at t = " << state.time << " (dt = " << dt << ")";
    throw Error(ErrorCode::NonFinite, os.str());
  }
  state.time += dt;
}

LatticeState step(const LatticeState& state, const ModelParams& params, double dt) {
  LatticeState next = state;
  Rk4Stepper stepper(state.size());
  stepper.step(next, params, dt);
  return next;
}

namespace {

Frame make_frame(const LatticeState& s) { return Frame{s.time, s.delta, s.phi}; }

}  // namespace

Trajectory evolve(LatticeState state, const ModelParams& params, const IntegratorConfig& config,
                  const EvolveHooks& hooks) {
  params.validate();
  config.validate();
  state.validate();
  if (state.size() != static_cast<std::size_t>(params.L)) {
    throw Error(ErrorCode::InvalidArgument, "state size does not match params.L");
  }

  const double span = config.t_end - state.time;
  const auto n_steps = span > 0.0 ? static_cast<std::size_t>(std::llround(span / config.dt)) : 0;
  const double t0 = state.time;

  Trajectory traj;
  Rk4Stepper stepper(state.size());

  const Observables initial = observables(state, params);
  const double n0 = initial.particle_number;
  const double e0 = initial.energy;
  const double e_scale = std::max(std::abs(e0), 1.0);

  auto check = [&](const Observables& obs) {
    const double dn = std::abs(obs.particle_number - n0);
    if (dn > config.tolerances.number) throw ConservationBreach("particle_number", dn, state.time);
    const double de = std::abs(obs.energy - e0) / e_scale;
    if (de > config.tolerances.energy) throw ConservationBreach("energy", de, state.time);
  };

  auto record = [&](const Observables& obs) {
    Frame f = make_frame(state);
    if (hooks.on_frame) hooks.on_frame(f, obs);
    if (hooks.store_frames) {
      traj.frames.push_back(std::move(f));
      traj.diagnostics.push_back(obs);
    }
  };

  record(initial);
  for (std::size_t n = 1; n <= n_steps; ++n) {
    stepper.step(state, params, config.dt);
    // Re-anchor the clock to avoid accumulating dt round-off.
    state.time = t0 + static_cast<double>(n) * config.dt;
    if (hooks.on_step) hooks.on_step(state, n);
    const bool frame_due = (n % config.frame_stride == 0) || n == n_steps;
    if (frame_due || n % config.check_stride == 0) {
      const Observables obs = observables(state, params);
      check(obs);
      if (frame_due) record(obs);
    }
  }
  traj.regularized_evaluations = stepper.regularized_evaluations();
  return traj;
}

}  // namespace hcb
