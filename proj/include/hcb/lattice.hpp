#pragma once

// Mean-field hard-core boson chain in canonical variables.
//
// Each site carries delta_j = cos(theta_j) = 1 - 2 rho_j and the condensate
// phase phi_j. The dynamics are the spin-coherent average of the XXZ form of
// the hard-core Bose-Hubbard model with hopping t and nearest-neighbour
// coupling V:
//
//   d delta_j/dt = (t/2) sum_a s_j s_{j+a} sin(phi_{j+a} - phi_j)
//   d phi_j/dt   = (t/2) (delta_j/s_j) sum_a s_{j+a} cos(phi_{j+a} - phi_j)
//                  - (V/2) sum_a delta_{j+a} - mu_eff/2
//
// with s_j = sqrt(1 - delta_j^2) and a = +-1.

#include <cstddef>
#include <span>
#include <vector>

namespace hcb {

enum class Boundary { periodic, open };

// Denominator floor for delta/sqrt(1 - delta^2) at density nodes.
inline constexpr double kNodeEpsilon = 1e-12;
// |delta| is kept at or below this after every integration step.
inline constexpr double kDeltaClamp = 1.0 - 1e-15;

struct ModelParams {
  int L = 200;
  double t = 1.0;
  double V = 0.9;
  Boundary boundary = Boundary::periodic;
  // Uniform offset of the phase rate (adds -mu_eff/2 to every dphi/dt).
  double mu_eff = 0.0;

  // g = t - V, the longitudinal field of the spin form.
  double g() const noexcept { return t - V; }

  // Throws ParamDomain unless L >= 8, t > 0 and 0 < V < t.
  void validate() const;
  bool operator==(const ModelParams&) const = default;
};

struct LatticeState {
  std::vector<double> delta;
  std::vector<double> phi;
  double time = 0.0;

  LatticeState() = default;
  explicit LatticeState(std::size_t L, double delta0 = 0.0, double phi0 = 0.0)
      : delta(L, delta0), phi(L, phi0) {}

  std::size_t size() const noexcept { return delta.size(); }

  // Throws InvalidArgument on size mismatch, non-finite entries or |delta| > 1.
  void validate() const;

  static LatticeState uniform(std::size_t L, double rho0, double phi0 = 0.0);
};

struct Densities {
  std::vector<double> rho;    // particle density (1 - delta)/2
  std::vector<double> rho_s;  // condensate density rho (1 - rho)
};

Densities density_from_state(const LatticeState& state);

inline double density_of(double delta) noexcept { return 0.5 * (1.0 - delta); }
inline double delta_of(double rho) noexcept { return 1.0 - 2.0 * rho; }

struct Rates {
  std::vector<double> delta_dot;
  std::vector<double> phi_dot;
  // Sites whose 1 - delta^2 fell below kNodeEpsilon during the evaluation.
  std::size_t regularized_sites = 0;
};

// In-place form used by the integrator. Output spans must have the lattice
// size. Returns the number of node-regularized sites.
std::size_t eom_rhs(std::span<const double> delta, std::span<const double> phi,
                    const ModelParams& params, std::span<double> delta_dot,
                    std::span<double> phi_dot);

Rates eom_rhs(const LatticeState& state, const ModelParams& params);

// Classical energy of the spin-coherent state, each bond counted once:
//   E = -sum_bonds (1/4)[t s_j s_{j+1} cos(phi_{j+1}-phi_j) + V delta_j delta_{j+1}]
//       - (g/2) sum_j delta_j
// The canonical pairing with eom_rhs is delta_dot = -2 dE/dphi and
// phi_dot = 2 dE/ddelta when mu_eff = 2g (the field term is a pure gauge).
double energy(const LatticeState& state, const ModelParams& params);

double particle_number(const LatticeState& state);

// Circular standard deviation sqrt(-2 ln R) with R = |<exp(i phi)>|.
double phase_dispersion(std::span<const double> phi);

// Wrapped phase difference phi_{j+1} - phi_j in (-pi, pi] for every bond.
// Periodic lattices include the closing bond (L bonds), open ones L-1.
std::vector<double> bond_phase_differences(std::span<const double> phi,
                                           Boundary boundary);

// Sum of the wrapped bond differences across the open chain (site 0 to L-1).
double net_phase_jump(std::span<const double> phi);

struct Observables {
  double particle_number = 0.0;
  double energy = 0.0;
  double max_density_rate = 0.0;  // max_j |d delta_j/dt| / 2
  double phase_dispersion = 0.0;
};

Observables observables(const LatticeState& state, const ModelParams& params);

}  // namespace hcb
