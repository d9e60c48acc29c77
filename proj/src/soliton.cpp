#include "hcb/soliton.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "hcb/error.hpp"

namespace hcb {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
// Phase-gradient tails decay as exp(-|z|/Gamma); beyond this many widths
// they are below double precision.
constexpr double kTailWidths = 40.0;
// Quadrature panels are at most this long (in lattice units).
constexpr double kPanel = 0.5;

int branch_sign(Species s) { return s == Species::bright ? +1 : -1; }

[[noreturn]] void domain_error(const std::string& msg) { throw Error(ErrorCode::ParamDomain, msg); }

void check_rho0(double rho0) {
  if (!(rho0 > 0.0 && rho0 < 1.0)) {
    std::ostringstream os;
    os << "background density rho0 = " << rho0 << " must lie in (0, 1)";
    domain_error(os.str());
  }
}

void check_coupling(const ModelParams& params) {
  if (!(params.t > 0.0) || !(params.V > 0.0 && params.V < params.t)) {
    std::ostringstream os;
    os << "coupling V = " << params.V << " must lie in (0, t) with t = " << params.t;
    domain_error(os.str());
  }
}

// sqrt of the bracket in 1/Gamma = gamma * sqrt(...).
double width_factor(double rho0, const ModelParams& params) {
  const double rho0h = 1.0 - rho0;
  const double r = params.V / params.t;
  const double num = 2.0 * (1.0 - r) * rho0 * rho0h;
  const double den = 0.25 * (rho0h - rho0) * (rho0h - rho0) + r * rho0 * rho0h;
  return std::sqrt(num / den);
}

// f(z) for a localized wave with precomputed width; no hard-core check.
double localized_raw(double z, double rho0, double gamma2, int sign, double width) {
  const double rho0h = 1.0 - rho0;
  const double b = rho0h - rho0;
  const double a = std::sqrt(b * b + 4.0 * gamma2 * rho0 * rho0h);
  return 2.0 * gamma2 * rho0 * rho0h / (sign * a * std::cosh(z / width) - b);
}

struct LocalizedShape {
  double rho0;
  double gamma2;
  int sign;
  double width;

  double f(double z) const { return localized_raw(z, rho0, gamma2, sign, width); }

  // (rho - rho0) / rho_s at z.
  double weight(double z) const {
    const double dev = f(z);
    const double rho = rho0 + dev;
    return dev / (rho * (1.0 - rho));
  }
};

LocalizedShape localized_shape(const SolitonSpec& spec, const ModelParams& params) {
  spec.validate();
  check_coupling(params);
  if (spec.is_train()) domain_error("localized profile requested for |vbar| > 1");
  const SolitonWidth w = soliton_width(spec.rho0, spec.vbar, params);
  return {spec.rho0, 1.0 - spec.vbar * spec.vbar, branch_sign(spec.species), w.value};
}

template <class F>
double integrate_panels(F&& f, double a, double b) {
  if (b == a) return 0.0;
  const double len = std::abs(b - a);
  const int panels = std::max(1, static_cast<int>(std::ceil(len / kPanel)));
  const double h = (b - a) / panels;
  double total = 0.0;
  for (int i = 0; i < panels; ++i) {
    const double lo = a + i * h;
    total += boost::math::quadrature::gauss<double, 20>::integrate(f, lo, lo + h);
  }
  return total;
}

// Cumulative integral of g over ascending points, anchored so that the value
// at -infinity is zero (tails beyond kTailWidths widths are negligible).
template <class G>
std::vector<double> cumulative_from_minus_infinity(std::span<const double> z, double width, G&& g) {
  std::vector<double> out(z.size(), 0.0);
  if (z.empty()) return out;
  const double start = -kTailWidths * width;
  double acc = 0.0;
  double prev = z.front();
  if (z.front() > start) acc = integrate_panels(g, start, z.front());
  out[0] = acc;
  for (std::size_t i = 1; i < z.size(); ++i) {
    // Skip the flat far-left tail entirely.
    const double lo = std::max(prev, start);
    if (z[i] > lo) acc += integrate_panels(g, lo, z[i]);
    out[i] = acc;
    prev = z[i];
  }
  return out;
}


}  // namespace

void SolitonSpec::validate() const {
  check_rho0(rho0);
  if (!std::isfinite(vbar) || std::abs(std::abs(vbar) - 1.0) < 1e-12) {
    std::ostringstream os;
    os << "scaled speed vbar = " << vbar << " must be finite and |vbar| != 1";
    domain_error(os.str());
  }
  if (!std::isfinite(center)) domain_error("soliton center must be finite");
}

bool SolitonSpec::is_train() const noexcept { return std::abs(vbar) > 1.0; }

void PhaseImprint::validate() const {
  if (n < 0 || n % 2 != 0) {
    domain_error("imprint index n = " + std::to_string(n) + " must be a non-negative even integer");
  }
  if (!(width > 0.0) || !std::isfinite(width)) domain_error("imprint width must be positive");
  for (std::size_t i = 0; i < centers.size(); ++i) {
    for (std::size_t k = i + 1; k < centers.size(); ++k) {
      if (std::abs(centers[i] - centers[k]) < 4.0 * width) {
        domain_error("imprint centers must be separated by at least 4 widths");
      }
    }
  }
}

double sound_speed(double rho0, const ModelParams& params) {
  check_rho0(rho0);
  check_coupling(params);
  const double rho_s = rho0 * (1.0 - rho0);
  return std::sqrt(2.0 * rho_s * (1.0 - params.V / params.t));
}

SolitonWidth soliton_width(double rho0, double vbar, const ModelParams& params) {
  check_rho0(rho0);
  check_coupling(params);
  const double v2 = vbar * vbar;
  if (!std::isfinite(vbar) || std::abs(v2 - 1.0) < 1e-12) {
    domain_error("soliton width diverges at |vbar| = 1");
  }
  const double gamma = std::sqrt(std::abs(1.0 - v2));
  return {1.0 / (gamma * width_factor(rho0, params)), v2 > 1.0};
}

double density_profile(double z, const SolitonSpec& spec, const ModelParams& params) {
  const LocalizedShape shape = localized_shape(spec, params);
  const double f = shape.f(z);
  const double rho = spec.rho0 + f;
  if (!(rho >= -1e-12 && rho <= 1.0 + 1e-12)) {
    std::ostringstream os;
    os << "profile density " << rho << " at z = " << z << " leaves [0, 1]";
    throw Error(ErrorCode::HardCoreViolation, os.str());
  }
  return f;
}

double phase_jump(const SolitonSpec& spec, const ModelParams& params) {
  spec.validate();
  if (spec.is_train()) domain_error("phase jump is defined for localized waves only");
  const double cs = sound_speed(spec.rho0, params);
  const double v = std::abs(spec.vbar);
  const double gamma = std::sqrt(1.0 - v * v);
  const double rho_s = spec.rho0 * (1.0 - spec.rho0);
  double arg = 2.0 * gamma * v * (1.0 - 2.0 * spec.rho0) / (1.0 - 4.0 * rho_s * v * v);
  if (std::abs(arg) > 1.0 + 1e-9) {
    std::ostringstream os;
    os << "asin argument " << arg << " outside [-1, 1]";
    domain_error(os.str());
  }
  arg = std::clamp(arg, -1.0, 1.0);
  return std::sqrt(1.0 - 2.0 * cs * cs) * (branch_sign(spec.species) * std::asin(arg) + kPi);
}

double signed_phase_jump(const SolitonSpec& spec, const ModelParams& params) {
  const double jump = phase_jump(spec, params);
  const double direction = spec.vbar < 0.0 ? -1.0 : 1.0;
  return direction * branch_sign(spec.species) * jump;
}

PhaseCalibration calibrate_phase(const SolitonSpec& spec, const ModelParams& params) {
  const LocalizedShape shape = localized_shape(spec, params);
  if (spec.vbar == 0.0) domain_error("phase gradient vanishes at vbar = 0; the phase is a step");
  PhaseCalibration cal;
  cal.target = signed_phase_jump(spec, params);
  const double reach = kTailWidths * shape.width;
  cal.integral = spec.vbar * integrate_panels([&](double z) { return shape.weight(z); }, -reach, reach);
  cal.kappa = cal.target / cal.integral;
  if (!std::isfinite(cal.kappa) || !(cal.kappa > 0.0)) {
    std::ostringstream os;
    os << "cannot match integrated phase " << cal.integral << " to jump " << cal.target;
    throw Error(ErrorCode::CalibrationFailure, os.str());
  }
  return cal;
}

std::vector<double> phase_profile(std::span<const double> z_grid, const SolitonSpec& spec,
                                  const ModelParams& params) {
  if (!std::is_sorted(z_grid.begin(), z_grid.end())) {
    throw Error(ErrorCode::InvalidArgument, "phase_profile grid must be ascending");
  }
  const LocalizedShape shape = localized_shape(spec, params);
  if (spec.vbar == 0.0) {
    const double jump = signed_phase_jump(spec, params);
    std::vector<double> out(z_grid.size());
    for (std::size_t i = 0; i < z_grid.size(); ++i) {
      out[i] = z_grid[i] > 0.0 ? jump : (z_grid[i] < 0.0 ? 0.0 : 0.5 * jump);
    }
    return out;
  }
  const PhaseCalibration cal = calibrate_phase(spec, params);
  const double scale = cal.kappa * spec.vbar;
  return cumulative_from_minus_infinity(z_grid, shape.width,
                                        [&](double z) { return scale * shape.weight(z); });
}

double phase_increment(double z0, double z1, const SolitonSpec& spec, const ModelParams& params) {
  const std::vector<double> grid = z0 <= z1 ? std::vector<double>{z0, z1} : std::vector<double>{z1, z0};
  const std::vector<double> phi = phase_profile(grid, spec, params);
  return z0 <= z1 ? phi[1] - phi[0] : phi[0] - phi[1];
}

BuiltState build_state(std::span<const SolitonSpec> specs, const ModelParams& params) {
  params.validate();
  if (specs.empty()) throw Error(ErrorCode::InvalidArgument, "build_state needs at least one soliton");
  const double rho0 = specs.front().rho0;
  double max_width = 0.0;
  for (const SolitonSpec& s : specs) {
    s.validate();
    if (s.is_train()) domain_error("build_state takes localized waves; use train_state for |vbar| > 1");
    if (std::abs(s.rho0 - rho0) > 1e-12) {
      throw Error(ErrorCode::InvalidArgument, "all solitons must share the background density");
    }
    max_width = std::max(max_width, soliton_width(s.rho0, s.vbar, params).value);
  }

  const int L = params.L;
  const bool periodic = params.boundary == Boundary::periodic;
  auto displacement = [&](double a, double b) {
    double d = a - b;
    if (periodic) d -= L * std::round(d / L);
    return d;
  };

  for (std::size_t i = 0; i < specs.size(); ++i) {
    for (std::size_t k = i + 1; k < specs.size(); ++k) {
      const double sep = std::abs(displacement(specs[i].center, specs[k].center));
      if (sep < kMinSeparationWidths * max_width) {
        std::ostringstream os;
        os << "solitons " << i << " and " << k << " are " << sep << " sites apart; need "
           << kMinSeparationWidths * max_width;
        throw Error(ErrorCode::SeparationTooSmall, os.str());
      }
    }
  }

  std::vector<double> dev(L, 0.0);
  std::vector<double> phi(L, 0.0);
  double total_jump = 0.0;

  std::vector<int> order(L);
  std::vector<double> z(L);
  std::vector<double> z_sorted(L);
  for (const SolitonSpec& s : specs) {
    const LocalizedShape shape = localized_shape(s, params);
    const double jump = signed_phase_jump(s, params);
    total_jump += jump;
    std::vector<int> wraps(L, 0);
    for (int j = 0; j < L; ++j) {
      const double raw = j - s.center;
      z[j] = displacement(j, s.center);
      wraps[j] = static_cast<int>(std::lround((raw - z[j]) / L));
    }
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return z[a] < z[b]; });
    for (int i = 0; i < L; ++i) z_sorted[i] = z[order[i]];
    const std::vector<double> phase = phase_profile(z_sorted, s, params);
    for (int i = 0; i < L; ++i) {
      const int j = order[i];
      dev[j] += shape.f(z[j]);
      phi[j] += phase[i] + wraps[j] * jump;
    }
  }

  BuiltState out;
  out.state = LatticeState(static_cast<std::size_t>(L));
  for (int j = 0; j < L; ++j) {
    const double rho = rho0 + dev[j];
    if (!(rho >= -1e-12 && rho <= 1.0 + 1e-12)) {
      std::ostringstream os;
      os << "superposed density " << rho << " at site " << j << " leaves [0, 1]";
      throw Error(ErrorCode::HardCoreViolation, os.str());
    }
    out.state.delta[j] = std::clamp(delta_of(rho), -kDeltaClamp, kDeltaClamp);
    out.state.phi[j] = phi[j];
  }

  if (periodic) {
    const double residual = total_jump - kTwoPi * std::round(total_jump / kTwoPi);
    if (std::abs(residual) > kWindingRepairLimit) {
      std::ostringstream os;
      os << "total phase jump " << total_jump << " misses a multiple of 2 pi by " << residual
         << " rad (limit " << kWindingRepairLimit << ")";
      throw Error(ErrorCode::WindingMismatch, os.str());
    }
    for (int j = 0; j < L; ++j) out.state.phi[j] -= residual * j / L;
    out.winding_correction = residual;
  }
  return out;
}

double max_train_speed(double rho0) {
  check_rho0(rho0);
  return 1.0 / (2.0 * std::sqrt(rho0 * (1.0 - rho0)));
}

namespace {

struct TrainShape {
  double rho0;
  double gamma2;  // negative
  double width;   // |Gamma|
  double a;
  double b;
  int sign;  // continuation of the localized branch: cosh -> cos

  double f(double z) const {
    const double rho0h = 1.0 - rho0;
    return 2.0 * gamma2 * rho0 * rho0h / (sign * a * std::cos(z / width) - b);
  }

  double weight(double z) const {
    const double dev = f(z);
    const double rho = rho0 + dev;
    return dev / (rho * (1.0 - rho));
  }
};

TrainShape train_shape(const SolitonSpec& spec, const ModelParams& params, double width) {
  spec.validate();
  check_coupling(params);
  if (!spec.is_train()) domain_error("train profile requires |vbar| > 1");
  const double rho0 = spec.rho0;
  const double rho0h = 1.0 - rho0;
  if (rho0 == 0.5) domain_error("no real train exists at half filling");
  const Species allowed = rho0 < 0.5 ? Species::bright : Species::dark;
  if (spec.species != allowed) {
    domain_error(std::string("trains at this background are ") +
                 (allowed == Species::bright ? "bright" : "dark") + " only");
  }
  const double gamma2 = 1.0 - spec.vbar * spec.vbar;
  const double b = rho0h - rho0;
  const double disc = b * b + 4.0 * gamma2 * rho0 * rho0h;
  if (disc < 0.0) {
    std::ostringstream os;
    os << "no real train for |vbar| = " << std::abs(spec.vbar) << " above " << max_train_speed(rho0);
    domain_error(os.str());
  }
  return {rho0, gamma2, width, std::sqrt(disc), b, branch_sign(spec.species)};
}

struct Commensuration {
  double width;
  double strain;
  int periods;
};

Commensuration commensurate(double width, double length) {
  const double period = kTwoPi * width;
  const int m = std::max(1, static_cast<int>(std::lround(length / period)));
  const double strain = length / (m * period) - 1.0;
  if (std::abs(strain) > 0.02) {
    std::ostringstream os;
    os << "train period " << period << " does not fit " << length << " sites within 2% strain";
    throw Error(ErrorCode::PeriodMismatch, os.str());
  }
  return {width * (1.0 + strain), strain, m};
}

void check_train_density(double rho, int site) {
  if (!(rho >= -1e-12 && rho <= 1.0 + 1e-12)) {
    std::ostringstream os;
    os << "train density " << rho << " at site " << site << " leaves [0, 1]";
    throw Error(ErrorCode::HardCoreViolation, os.str());
  }
}

}  // namespace

double train_density_profile(double z, const SolitonSpec& spec, const ModelParams& params, double width) {
  return train_shape(spec, params, width).f(z);
}

TrainState train_state(const SolitonSpec& spec, const ModelParams& params) {
  params.validate();
  const SolitonWidth w = soliton_width(spec.rho0, spec.vbar, params);
  const int L = params.L;
  const bool periodic = params.boundary == Boundary::periodic;

  TrainState out;
  out.info.width = w.value;
  if (periodic) {
    const Commensuration c = commensurate(w.value, L);
    out.info.width = c.width;
    out.info.strain = c.strain;
    out.info.periods = c.periods;
  }
  out.info.period = kTwoPi * out.info.width;
  const TrainShape shape = train_shape(spec, params, out.info.width);
  const double scale = sound_speed(spec.rho0, params) * spec.vbar;

  out.state = LatticeState(static_cast<std::size_t>(L));
  double phase = 0.0;
  for (int j = 0; j < L; ++j) {
    const double z = j - spec.center;
    if (j > 0) {
      phase += integrate_panels([&](double y) { return scale * shape.weight(y); }, z - 1.0, z);
    }
    const double rho = spec.rho0 + shape.f(z);
    check_train_density(rho, j);
    out.state.delta[j] = std::clamp(delta_of(rho), -kDeltaClamp, kDeltaClamp);
    out.state.phi[j] = phase;
  }
  if (periodic) {
    const double closing = integrate_panels([&](double y) { return scale * shape.weight(y); },
                                            L - 1 - spec.center, L - spec.center);
    const double winding = phase + closing;
    const double residual = winding - kTwoPi * std::round(winding / kTwoPi);
    for (int j = 0; j < L; ++j) out.state.phi[j] -= residual * j / L;
    out.info.winding_correction = residual;
  }
  return out;
}

TrainState train_pair_state(double rho0, double vbar, const ModelParams& params) {
  params.validate();
  if (params.L % 2 != 0) throw Error(ErrorCode::InvalidArgument, "train pairs need an even lattice");
  if (!(vbar > 1.0)) domain_error("train pair requires vbar > 1");
  const Species species = rho0 < 0.5 ? Species::bright : Species::dark;
  const SolitonSpec spec{species, rho0, vbar, 0.0};
  const SolitonWidth w = soliton_width(rho0, vbar, params);
  const int L = params.L;
  const int half = L / 2;
  const Commensuration c = commensurate(w.value, half);

  TrainState out;
  out.info.width = c.width;
  out.info.strain = c.strain;
  out.info.periods = c.periods;
  out.info.period = kTwoPi * c.width;
  const TrainShape shape = train_shape(spec, params, c.width);
  const double scale = sound_speed(rho0, params) * vbar;

  // Left half: train moving right. Bond phase increments are mirrored with
  // opposite sign on the right half; near both seams they are blended through
  // zero over a quarter period so the gradient reversal does not launch a
  // shock (the train phase gradient never vanishes on its own).
  // Seams sit half a period from the extrema, where |f| and the phase
  // gradient are smallest.
  const double shift = 0.5 * out.info.period;
  std::vector<double> increment(half);
  for (int b = 0; b < half; ++b) {
    increment[b] = integrate_panels([&](double y) { return scale * shape.weight(y); }, b + shift, b + 1.0 + shift);
  }
  const double blend = 0.25 * out.info.period;
  out.info.seam_width = blend;
  out.state = LatticeState(static_cast<std::size_t>(L));
  double phase = 0.0;
  for (int j = 0; j < L; ++j) {
    // The right half mirrors the left about L/2 and moves the other way.
    const int image = j < half ? j : L - j;
    const double rho = rho0 + shape.f(image + shift);
    check_train_density(rho, j);
    out.state.delta[j] = std::clamp(delta_of(rho), -kDeltaClamp, kDeltaClamp);
    out.state.phi[j] = phase;
    const double x = j + 0.5;
    const double envelope =
        std::abs(std::tanh(x / blend) * std::tanh((half - x) / blend) * std::tanh((L - x) / blend));
    phase += j < half ? increment[j] * envelope : -increment[L - j - 1] * envelope;
  }
  return out;
}

LatticeState phase_imprint(LatticeState state, const PhaseImprint& imprint) {
  imprint.validate();
  state.validate();
  if (!state.delta.empty()) {
    const auto [lo, hi] = std::minmax_element(state.delta.begin(), state.delta.end());
    // delta = 1 - 2 rho, so a 1e-9 density spread is 2e-9 in delta.
    if (*hi - *lo > 2e-9) {
      throw Error(ErrorCode::NonUniformInput, "phase imprinting requires a uniform density");
    }
  }
  for (std::size_t j = 0; j < state.size(); ++j) {
    double add = 0.0;
    for (double c : imprint.centers) {
      add += imprint.n * kPi * std::tanh((static_cast<double>(j) - c) / imprint.width);
    }
    state.phi[j] += add;
  }
  return state;
}

}  // namespace hcb
