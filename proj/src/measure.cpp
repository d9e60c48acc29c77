#include <algorithm>
#include <cmath>
#include <sstream>

#include "hcb/error.hpp"
#include "hcb/experiments.hpp"

namespace hcb {

namespace {

std::size_t wrap_index(long j, std::size_t L) {
  const long n = static_cast<long>(L);
  return static_cast<std::size_t>(((j % n) + n) % n);
}

double site_distance(double a, double b, std::size_t L, Boundary boundary) {
  double d = a - b;
  if (boundary == Boundary::periodic) d -= static_cast<double>(L) * std::round(d / static_cast<double>(L));
  return std::abs(d);
}

// Signed deviation: positive at the extremum of the requested species.
std::vector<double> species_deviation(std::span<const double> delta, double rho0, Species species) {
  const double sign = species == Species::bright ? 1.0 : -1.0;
  std::vector<double> y(delta.size());
  for (std::size_t j = 0; j < delta.size(); ++j) y[j] = sign * (density_of(delta[j]) - rho0);
  return y;
}

struct Peak {
  double offset;  // sub-site shift from the sample maximum, in [-0.5, 0.5]
  double value;
};

Peak parabola(double ym, double y0, double yp) {
  const double den = ym - 2.0 * y0 + yp;
  if (!(den < 0.0)) return {0.0, y0};
  const double off = std::clamp(0.5 * (ym - yp) / den, -0.5, 0.5);
  return {off, y0 - 0.25 * (ym - yp) * off};
}

[[noreturn]] void lost(const std::string& msg) { throw Error(ErrorCode::TrackerLost, msg); }

}  // namespace

std::vector<SolitonFit> fit_solitons(const LatticeState& state, double rho0, Species species,
                                     std::size_t count, double min_separation, Boundary boundary) {
  const std::size_t L = state.size();
  const bool periodic = boundary == Boundary::periodic;
  const std::vector<double> y = species_deviation(state.delta, rho0, species);
  auto at = [&](long j) { return y[wrap_index(j, L)]; };

  std::vector<long> peaks;
  for (long j = 0; j < static_cast<long>(L); ++j) {
    const bool edge = j == 0 || j + 1 == static_cast<long>(L);
    if (edge && !periodic) continue;
    if (at(j) > 0.0 && at(j) >= at(j - 1) && at(j) > at(j + 1)) peaks.push_back(j);
  }
  std::sort(peaks.begin(), peaks.end(), [&](long a, long b) { return at(a) > at(b); });

  std::vector<long> chosen;
  for (long p : peaks) {
    bool clear = true;
    for (long c : chosen) clear = clear && site_distance(p, c, L, boundary) >= min_separation;
    if (clear) chosen.push_back(p);
    if (chosen.size() == count) break;
  }
  if (chosen.size() < count) {
    std::ostringstream os;
    os << "found " << chosen.size() << " of " << count << " separated extrema";
    lost(os.str());
  }

  std::vector<SolitonFit> fits;
  for (long j : chosen) {
    const Peak pk = parabola(at(j - 1), at(j), at(j + 1));
    SolitonFit fit;
    fit.amplitude = pk.value;
    fit.center = j + pk.offset;
    if (periodic) fit.center -= static_cast<double>(L) * std::floor(fit.center / static_cast<double>(L));

    const double half = 0.5 * pk.value;
    const long reach = static_cast<long>(L / 2);
    auto crossing = [&](int dir) {
      long k = j;
      for (long step = 0; step < reach; ++step) {
        const long next = k + dir;
        if (!periodic && (next < 0 || next >= static_cast<long>(L))) lost("half maximum not reached before the chain end");
        if (at(next) <= half) {
          return k + dir * (at(k) - half) / (at(k) - at(next));
        }
        k = next;
      }
      lost("half maximum not reached within half the lattice");
    };
    fit.width = crossing(+1) - crossing(-1);
    fits.push_back(fit);
  }
  std::sort(fits.begin(), fits.end(), [](const SolitonFit& a, const SolitonFit& b) { return a.center < b.center; });
  return fits;
}

double profile_residual(const LatticeState& state, const SolitonSpec& spec, const ModelParams& params,
                        double window_widths) {
  const double window = window_widths * soliton_width(spec.rho0, spec.vbar, params).value;
  const std::size_t L = state.size();
  double num = 0.0;
  double den = 0.0;
  for (std::size_t j = 0; j < L; ++j) {
    double z = static_cast<double>(j) - spec.center;
    if (params.boundary == Boundary::periodic) z -= static_cast<double>(L) * std::round(z / static_cast<double>(L));
    if (std::abs(z) > window) continue;
    const double f = density_profile(z, spec, params);
    const double meas = density_of(state.delta[j]) - spec.rho0;
    num += (meas - f) * (meas - f);
    den += f * f;
  }
  if (!(den > 0.0)) throw Error(ErrorCode::InvalidArgument, "empty residual window");
  return std::sqrt(num / den);
}

ExtremumTracker::ExtremumTracker(const TrackerSpec& spec, std::size_t L, Boundary boundary)
    : spec_(spec), L_(L), boundary_(boundary) {
  if (!(spec.search_radius >= 1.0)) throw Error(ErrorCode::InvalidArgument, "search radius must be >= 1 site");
}

void ExtremumTracker::observe(double time, std::span<const double> delta) {
  if (delta.size() != L_) throw Error(ErrorCode::InvalidArgument, "tracker frame has the wrong size");
  const bool periodic = boundary_ == Boundary::periodic;
  const double last = positions_.empty() ? spec_.start : positions_.back();
  long lo = static_cast<long>(std::floor(last - spec_.search_radius));
  long hi = static_cast<long>(std::ceil(last + spec_.search_radius));
  if (!periodic) {
    lo = std::max(lo, 0L);
    hi = std::min(hi, static_cast<long>(L_) - 1);
  }
  const double sign = spec_.species == Species::bright ? 1.0 : -1.0;
  auto y = [&](long j) { return sign * (density_of(delta[wrap_index(j, L_)]) - spec_.rho0); };

  long best = lo;
  for (long j = lo; j <= hi; ++j) {
    if (y(j) > y(best)) best = j;
  }
  std::ostringstream where;
  where << " near site " << last << " at t = " << time;
  if (best == lo || best == hi) lost("extremum at the edge of the search window" + where.str());

  const Peak pk = parabola(y(best - 1), y(best), y(best + 1));
  if (reference_amplitude_ == 0.0) {
    if (!(pk.value > 0.0)) lost("no extremum of the tracked species" + where.str());
    reference_amplitude_ = pk.value;
  } else if (pk.value < spec_.min_amplitude_fraction * reference_amplitude_) {
    lost("tracked extremum faded" + where.str());
  }
  times_.push_back(time);
  positions_.push_back(static_cast<double>(best) + pk.offset);
}

double ExtremumTracker::speed() const {
  const std::size_t n = times_.size();
  if (n < 3) lost("fewer than three tracked positions");
  double mt = 0.0;
  double mx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mt += times_[i];
    mx += positions_[i];
  }
  mt /= static_cast<double>(n);
  mx /= static_cast<double>(n);
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (times_[i] - mt) * (positions_[i] - mx);
    sxx += (times_[i] - mt) * (times_[i] - mt);
  }
  if (!(sxx > 0.0)) lost("tracked positions span no time");
  return sxy / sxx;
}

double measure_soliton_speed(const Trajectory& trajectory, const TrackerSpec& tracker, Boundary boundary,
                             double t_from, double t_to) {
  ExtremumTracker tr(tracker, trajectory.lattice_size(), boundary);
  for (const Frame& f : trajectory.frames) {
    if (f.time < t_from || f.time > t_to) continue;
    tr.observe(f.time, f.delta);
  }
  return tr.speed();
}

}  // namespace hcb
