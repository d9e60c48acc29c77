#pragma once

// Closed-form solitary waves of the continuum hard-core boson equations and
// their discretization as lattice initial conditions.
//
// Over a background density rho0 (hole density rho0h = 1 - rho0) a wave
// moving at v = vbar * c_s has density rho0 + f(z), z = x - v t, with
//
//   f(z) = 2 gamma^2 rho0 rho0h / ( sign A cosh(z/Gamma) - (rho0h - rho0) ),
//   A = sqrt((rho0h - rho0)^2 + 4 gamma^2 rho0 rho0h),  gamma = sqrt(1 - vbar^2),
//
// sign = +1 for the bright (elevation) branch and -1 for the dark (depression)
// branch. For |vbar| > 1 the width becomes imaginary and cosh continues to a
// cosine: a periodic train.

#include <span>
#include <vector>

#include "hcb/lattice.hpp"

namespace hcb {

// Sign of the density deviation: bright is an elevation, dark a depression,
// regardless of which side of half filling rho0 lies on.
enum class Species { bright, dark };

struct SolitonSpec {
  Species species = Species::bright;
  double rho0 = 0.45;
  double vbar = 0.5;    // signed, in units of the sound speed
  double center = 0.0;  // lattice coordinate of the density extremum at t = 0

  // rho0 in (0,1) and |vbar| != 1. Throws ParamDomain.
  void validate() const;
  bool is_train() const noexcept;
};

struct PhaseImprint {
  int n = 2;           // even; phi += n pi tanh((x - x_i)/width)
  double width = 3.0;
  std::vector<double> centers;

  // n even and >= 0, width > 0, centers pairwise >= 4 width apart.
  void validate() const;
  bool operator==(const PhaseImprint&) const = default;
};

// Speed of sound sqrt(2 rho0 (1 - rho0) (1 - V/t)) in lattice sites per 1/t.
// Simulation velocities are t times this.
double sound_speed(double rho0, const ModelParams& params);

struct SolitonWidth {
  double value = 0.0;     // Gamma, or |Gamma| when periodic
  bool periodic = false;  // |vbar| > 1: the width is imaginary
};

SolitonWidth soliton_width(double rho0, double vbar, const ModelParams& params);

// Density deviation f(z) of a localized wave. Throws HardCoreViolation if
// rho0 + f leaves [0, 1], ParamDomain for |vbar| >= 1.
double density_profile(double z, const SolitonSpec& spec, const ModelParams& params);

// Closed-form characteristic phase jump
//   sqrt(1 - 2 c_s^2) [ +- asin( 2 gamma vbar (1 - 2 rho0) / (1 - 4 rho0s vbar^2) ) + pi ]
// evaluated at |vbar|, with + for bright and - for dark.
double phase_jump(const SolitonSpec& spec, const ModelParams& params);

// Net phase change phi(+inf) - phi(-inf) across the constructed profile.
// Bright waves moving right carry +phase_jump, dark ones -phase_jump; the sign
// flips with the direction of motion. At vbar = 0 the vbar -> 0+ limit is used.
double signed_phase_jump(const SolitonSpec& spec, const ModelParams& params);

struct PhaseCalibration {
  double kappa = 0.0;     // phi'(z) = kappa vbar (rho - rho0) / rho_s
  double integral = 0.0;  // integral of vbar (rho - rho0)/rho_s over z
  double target = 0.0;    // signed_phase_jump
};

// Fixes kappa by matching the integrated phase gradient to the closed-form
// jump. Throws CalibrationFailure if no positive finite kappa matches, and
// ParamDomain at vbar = 0 where the phase is a step.
PhaseCalibration calibrate_phase(const SolitonSpec& spec, const ModelParams& params);

// Phase phi(z) of a localized wave at the given co-moving coordinates, with
// phi(-inf) = 0. z_grid must be ascending. At vbar = 0 the profile is a step
// of signed_phase_jump centered on the density extremum.
std::vector<double> phase_profile(std::span<const double> z_grid, const SolitonSpec& spec,
                                  const ModelParams& params);

// Integrated phase change between two coordinates, phi(z1) - phi(z0).
double phase_increment(double z0, double z1, const SolitonSpec& spec, const ModelParams& params);

// Minimum center separation for superposed waves, in units of the largest width.
inline constexpr double kMinSeparationWidths = 6.0;
// Largest winding mismatch (radians) repaired by a uniform counter-gradient.
inline constexpr double kWindingRepairLimit = 0.05;

struct BuiltState {
  LatticeState state;
  // Total phase spread over the ring by the counter-gradient (periodic only).
  double winding_correction = 0.0;
};

// Samples the superposition rho0 + sum_i f_i, phi = sum_i phi_i at integer
// sites. Requires a common rho0, localized waves, pairwise separation of at
// least kMinSeparationWidths widths, and (periodic) a total jump within
// kWindingRepairLimit of a multiple of 2 pi.
BuiltState build_state(std::span<const SolitonSpec> specs, const ModelParams& params);

struct TrainInfo {
  double width = 0.0;   // |Gamma| after commensuration
  double period = 0.0;  // 2 pi |Gamma|
  double strain = 0.0;  // relative |Gamma| adjustment applied
  int periods = 0;      // periods per train segment (0 for open chains)
  double winding_correction = 0.0;
  double seam_width = 0.0;  // phase-gradient blend at the seams of a train pair
};

struct TrainState {
  LatticeState state;
  TrainInfo info;
};

// Largest supersonic vbar with a real train profile at rho0: 1 / (2 sqrt(rho0 rho0h)).
double max_train_speed(double rho0);

// Periodic train density deviation; like the localized profile it has the
// species' extremum (density maximum for bright, minimum for dark) at z = 0.
double train_density_profile(double z, const SolitonSpec& spec, const ModelParams& params,
                             double width);

// A single train filling the lattice. Periodic chains get an integer number
// of periods (|Gamma| strained by at most 2%, else PeriodMismatch) and the
// leftover phase winding spread as a uniform counter-gradient.
TrainState train_state(const SolitonSpec& spec, const ModelParams& params);

// Counter-propagating trains, one per half lattice: the left half moves
// right, the right half is its mirror image moving left. Zero net winding.
// The phase gradient is blended through zero over a quarter period at both
// seams.
TrainState train_pair_state(double rho0, double vbar, const ModelParams& params);

// phi_j += sum_i n pi tanh((j - x_i)/width). The input must have uniform
// density to within 1e-9 (NonUniformInput otherwise).
LatticeState phase_imprint(LatticeState state, const PhaseImprint& imprint);

}  // namespace hcb
