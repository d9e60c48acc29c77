#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "hcb/lattice.hpp"

namespace hcb {

struct ConservationTolerances {
  double number = 1e-8;   // absolute drift of sum_j rho_j
  double energy = 1e-6;   // relative drift |E - E0| / max(|E0|, 1)
  bool operator==(const ConservationTolerances&) const = default;
};

struct IntegratorConfig {
  double dt = 0.005;
  double t_end = 0.0;
  std::size_t frame_stride = 100;
  ConservationTolerances tolerances{};
  // Conservation checks run every this many steps (and at every frame).
  std::size_t check_stride = 100;

  // Throws ParamDomain unless 0 < dt <= 0.05 and frame_stride >= 1.
  void validate() const;
  bool operator==(const IntegratorConfig&) const = default;
};

struct Frame {
  double time = 0.0;
  std::vector<double> delta;
  std::vector<double> phi;
};

struct Trajectory {
  std::vector<Frame> frames;
  std::vector<Observables> diagnostics;
  // Total count of node-regularized site evaluations over the run.
  std::size_t regularized_evaluations = 0;

  LatticeState state_at(std::size_t frame) const;
  std::size_t lattice_size() const noexcept {
    return frames.empty() ? 0 : frames.front().delta.size();
  }
};

// Reusable classical RK4 stepper. Holds the stage buffers so the hot loop
// does not allocate.
class Rk4Stepper {
 public:
  explicit Rk4Stepper(std::size_t L);

  // Advances the state by dt in place. Throws NonFinite on blow-up.
  void step(LatticeState& state, const ModelParams& params, double dt);

  std::size_t regularized_evaluations() const noexcept { return regularized_; }

 private:
  std::vector<double> k_delta_[4];
  std::vector<double> k_phi_[4];
  std::vector<double> tmp_delta_;
  std::vector<double> tmp_phi_;
  std::size_t regularized_ = 0;
};

LatticeState step(const LatticeState& state, const ModelParams& params, double dt);

// Called once per recorded frame, in order.
using FrameObserver = std::function<void(const Frame&, const Observables&)>;

// Called after every step with the live state; used by online analysis that
// needs finer time resolution than the recorded frames.
using StepObserver = std::function<void(const LatticeState&, std::size_t step)>;

struct EvolveHooks {
  FrameObserver on_frame;
  StepObserver on_step;
  // When false, frames are only handed to on_frame and not stored.
  bool store_frames = true;
};

// Integrates from state.time to config.t_end with fixed steps. The number of
// steps is round((t_end - time)/dt); a frame is recorded at the start, every
// frame_stride steps, and at the end. Throws ConservationBreach or NonFinite.
Trajectory evolve(LatticeState state, const ModelParams& params, const IntegratorConfig& config,
                  const EvolveHooks& hooks = {});

}  // namespace hcb
