#include "hcb/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "hcb/error.hpp"

namespace hcb {

void ModelParams::validate() const {
  std::ostringstream os;
  if (L < 8) {
    os << "lattice size L = " << L << " must be at least 8";
  } else if (!(t > 0.0) || !std::isfinite(t)) {
    os << "hopping t = " << t << " must be positive";
  } else if (!(V > 0.0 && V < t)) {
    os << "coupling V = " << V << " must lie in (0, t) with t = " << t;
  } else if (!std::isfinite(mu_eff)) {
    os << "mu_eff must be finite";
  } else {
    return;
  }
  throw Error(ErrorCode::ParamDomain, os.str());
}

void LatticeState::validate() const {
  if (delta.size() != phi.size()) {
    throw Error(ErrorCode::InvalidArgument, "delta and phi have different lengths");
  }
  for (std::size_t j = 0; j < delta.size(); ++j) {
    if (!std::isfinite(delta[j]) || !std::isfinite(phi[j])) {
      throw Error(ErrorCode::InvalidArgument, "non-finite state entry at site " + std::to_string(j));
    }
    if (std::abs(delta[j]) > 1.0) {
      throw Error(ErrorCode::InvalidArgument, "|delta| > 1 at site " + std::to_string(j));
    }
  }
}

LatticeState LatticeState::uniform(std::size_t L, double rho0, double phi0) {
  return LatticeState(L, delta_of(rho0), phi0);
}

Densities density_from_state(const LatticeState& state) {
  Densities out;
  out.rho.resize(state.size());
  out.rho_s.resize(state.size());
  for (std::size_t j = 0; j < state.size(); ++j) {
    const double rho = density_of(state.delta[j]);
    out.rho[j] = rho;
    out.rho_s[j] = rho * (1.0 - rho);
  }
  return out;
}

std::size_t eom_rhs(std::span<const double> delta, std::span<const double> phi,
                    const ModelParams& params, std::span<double> delta_dot,
                    std::span<double> phi_dot) {
  const std::size_t L = delta.size();
  const double half_t = 0.5 * params.t;
  const double half_V = 0.5 * params.V;
  const double offset = -0.5 * params.mu_eff;
  const bool periodic = params.boundary == Boundary::periodic;

  // delta_dot accumulates sum_a s_{j+a} sin(...) and phi_dot the matching
  // cosine sum; both are scaled per site afterwards.
  std::fill(delta_dot.begin(), delta_dot.end(), 0.0);
  std::fill(phi_dot.begin(), phi_dot.end(), 0.0);

  auto s_of = [&](std::size_t j) {
    return std::sqrt(std::max(1.0 - delta[j] * delta[j], 0.0));
  };

  const std::size_t bonds = periodic ? L : L - 1;
  double s_left = s_of(0);
  for (std::size_t b = 0; b < bonds; ++b) {
    const std::size_t j = b;
    const std::size_t k = (b + 1 == L) ? 0 : b + 1;
    const double s_right = s_of(k);
    const double dphi = phi[k] - phi[j];
    const double sn = std::sin(dphi);
    const double cs = std::cos(dphi);
    // Bond j-k seen from j (phase difference dphi) and from k (-dphi).
    delta_dot[j] += s_right * sn;
    delta_dot[k] -= s_left * sn;
    phi_dot[j] += s_right * cs;
    phi_dot[k] += s_left * cs;
    s_left = s_right;
  }

  std::size_t regularized = 0;
  for (std::size_t j = 0; j < L; ++j) {
    const double one_minus = 1.0 - delta[j] * delta[j];
    if (one_minus < kNodeEpsilon) ++regularized;
    const double s = std::sqrt(std::max(one_minus, 0.0));
    const double s_reg = std::sqrt(std::max(one_minus, kNodeEpsilon));
    double neighbor_delta = 0.0;
    if (j > 0) neighbor_delta += delta[j - 1];
    else if (periodic) neighbor_delta += delta[L - 1];
    if (j + 1 < L) neighbor_delta += delta[j + 1];
    else if (periodic) neighbor_delta += delta[0];
    delta_dot[j] *= half_t * s;
    phi_dot[j] = half_t * (delta[j] / s_reg) * phi_dot[j] - half_V * neighbor_delta + offset;
  }
  return regularized;
}

Rates eom_rhs(const LatticeState& state, const ModelParams& params) {
  Rates out;
  out.delta_dot.resize(state.size());
  out.phi_dot.resize(state.size());
  out.regularized_sites = eom_rhs(state.delta, state.phi, params, out.delta_dot, out.phi_dot);
  return out;
}

double energy(const LatticeState& state, const ModelParams& params) {
  const std::size_t L = state.size();
  const bool periodic = params.boundary == Boundary::periodic;
  const std::size_t bonds = periodic ? L : L - 1;
  double bond_sum = 0.0;
  for (std::size_t j = 0; j < bonds; ++j) {
    const std::size_t k = (j + 1 == L) ? 0 : j + 1;
    const double sj = std::sqrt(std::max(1.0 - state.delta[j] * state.delta[j], 0.0));
    const double sk = std::sqrt(std::max(1.0 - state.delta[k] * state.delta[k], 0.0));
    bond_sum += params.t * sj * sk * std::cos(state.phi[k] - state.phi[j]) +
                params.V * state.delta[j] * state.delta[k];
  }
  double field = 0.0;
  for (double d : state.delta) field += d;
  return -0.25 * bond_sum - 0.5 * params.g() * field;
}

double particle_number(const LatticeState& state) {
  double n = 0.0;
  for (double d : state.delta) n += density_of(d);
  return n;
}

double phase_dispersion(std::span<const double> phi) {
  if (phi.empty()) return 0.0;
  double c = 0.0;
  double s = 0.0;
  for (double p : phi) {
    c += std::cos(p);
    s += std::sin(p);
  }
  const double R = std::hypot(c, s) / static_cast<double>(phi.size());
  if (R >= 1.0) return 0.0;
  if (R <= 0.0) return std::numeric_limits<double>::infinity();
  return std::sqrt(-2.0 * std::log(R));
}

namespace {

double wrap(double x) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double w = std::remainder(x, two_pi);
  if (w <= -std::numbers::pi) w += two_pi;
  return w;
}

}  // namespace

std::vector<double> bond_phase_differences(std::span<const double> phi, Boundary boundary) {
  const std::size_t L = phi.size();
  const std::size_t bonds = boundary == Boundary::periodic ? L : (L == 0 ? 0 : L - 1);
  std::vector<double> out(bonds);
  for (std::size_t j = 0; j < bonds; ++j) {
    out[j] = wrap(phi[(j + 1) % L] - phi[j]);
  }
  return out;
}

double net_phase_jump(std::span<const double> phi) {
  double total = 0.0;
  for (std::size_t j = 0; j + 1 < phi.size(); ++j) total += wrap(phi[j + 1] - phi[j]);
  return total;
}

Observables observables(const LatticeState& state, const ModelParams& params) {
  Observables obs;
  obs.particle_number = particle_number(state);
  obs.energy = energy(state, params);
  const Rates rates = eom_rhs(state, params);
  double m = 0.0;
  for (double r : rates.delta_dot) m = std::max(m, std::abs(r));
  obs.max_density_rate = 0.5 * m;
  obs.phase_dispersion = phase_dispersion(state.phi);
  return obs;
}

}  // namespace hcb
