#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "hcb/error.hpp"
#include "hcb/experiments.hpp"

namespace hcb {

std::string to_string(BreatherVerdict v) { return v == BreatherVerdict::bound ? "bound" : "dissociated"; }

namespace {

struct PeriodStats {
  double mean = 0.0;
  double std = 0.0;
  std::size_t cycles = 0;
};

// Successive maxima of a sampled signal, one per excursion above its mean.
// An excursion only starts once the signal clears mean + h and ends below
// mean - h (h a quarter of the standard deviation), so ripples on a slow
// oscillation are not counted as cycles.
PeriodStats periods_of(const std::vector<double>& t, const std::vector<double>& x) {
  PeriodStats out;
  const std::size_t n = x.size();
  if (n < 3) return out;
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(n);
  double sd = 0.0;
  for (double v : x) sd += (v - mean) * (v - mean);
  sd = std::sqrt(sd / static_cast<double>(n));
  if (!(sd > 0.0)) return out;
  const double hi = mean + 0.25 * sd;
  const double lo = mean - 0.25 * sd;

  std::vector<double> peaks;
  std::size_t i = 0;
  while (i < n && x[i] > lo) ++i;  // skip a partial excursion at the start
  while (i < n) {
    while (i < n && x[i] < hi) ++i;
    if (i >= n) break;
    std::size_t k = i;
    while (i < n && x[i] > lo) {
      if (x[i] > x[k]) k = i;
      ++i;
    }
    if (i >= n) break;  // partial excursion at the end
    double tk = t[k];
    if (k > 0 && k + 1 < n) {
      const double den = x[k - 1] - 2.0 * x[k] + x[k + 1];
      if (den < 0.0) tk += 0.25 * (x[k - 1] - x[k + 1]) / den * (t[k + 1] - t[k - 1]);
    }
    peaks.push_back(tk);
  }
  if (peaks.size() < 2) return out;
  std::vector<double> p(peaks.size() - 1);
  for (std::size_t k = 1; k < peaks.size(); ++k) p[k - 1] = peaks[k] - peaks[k - 1];
  for (double v : p) out.mean += v;
  out.mean /= static_cast<double>(p.size());
  for (double v : p) out.std += (v - out.mean) * (v - out.mean);
  out.std = std::sqrt(out.std / static_cast<double>(p.size()));
  out.cycles = p.size();
  return out;
}

double slope(const std::vector<double>& t, const std::vector<double>& y) {
  const std::size_t n = t.size();
  if (n < 2) return 0.0;
  double mt = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mt += t[i];
    my += y[i];
  }
  mt /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (t[i] - mt) * (y[i] - my);
    sxx += (t[i] - mt) * (t[i] - mt);
  }
  return sxx > 0.0 ? sxy / sxx : 0.0;
}

}  // namespace

namespace {

struct Cluster {
  double center;
  std::size_t first;
  std::size_t last;
};

// Regions of |rho - 1/2| > threshold, merged across short gaps, keeping only
// those that hold both a bright and a dark excursion.
std::vector<Cluster> bipolar_clusters(const std::vector<double>& rho, double threshold, double merge_gap) {
  std::vector<Cluster> out;
  const std::size_t L = rho.size();
  std::size_t j = 0;
  while (j < L) {
    if (std::abs(rho[j] - 0.5) <= threshold) {
      ++j;
      continue;
    }
    const std::size_t first = j;
    std::size_t last = j;
    bool up = false, down = false;
    double wsum = 0.0, xsum = 0.0;
    for (; j < L; ++j) {
      const double d = rho[j] - 0.5;
      if (std::abs(d) > threshold) {
        last = j;
        up = up || d > 0.0;
        down = down || d < 0.0;
        wsum += std::abs(d);
        xsum += std::abs(d) * static_cast<double>(j);
      } else if (static_cast<double>(j - last) > merge_gap) {
        break;
      }
    }
    if (up && down) out.push_back({xsum / wsum, first, last});
  }
  return out;
}

struct Track {
  std::vector<std::size_t> samples;
  std::vector<double> positions;
};

}  // namespace

BreatherReport analyze_breather(const std::vector<double>& times, const std::vector<std::vector<double>>& rho,
                                const PhaseImprint& imprint, const BreatherConfig& config) {
  if (times.size() != rho.size() || times.size() < 3) {
    throw Error(ErrorCode::NoOscillationDetected, "too few density samples after the transient");
  }
  const std::size_t S = times.size();
  const std::size_t L = rho.front().size();

  std::vector<double> mean(L, 0.0), var(L, 0.0);
  for (const auto& row : rho) {
    for (std::size_t j = 0; j < L; ++j) mean[j] += row[j];
  }
  for (double& m : mean) m /= static_cast<double>(S);
  for (const auto& row : rho) {
    for (std::size_t j = 0; j < L; ++j) var[j] += (row[j] - mean[j]) * (row[j] - mean[j]);
  }
  for (double& v : var) v /= static_cast<double>(S);
  const double max_var = *std::max_element(var.begin(), var.end());
  if (!(max_var > config.noise_floor)) {
    std::ostringstream os;
    os << "largest site variance " << max_var << " is below the noise floor " << config.noise_floor;
    throw Error(ErrorCode::NoOscillationDetected, os.str());
  }

  const double merge_gap = config.merge_gap_widths * imprint.width;
  const double link_radius = config.link_radius_widths * imprint.width;

  // Greedy nearest-neighbour linking of clusters into tracks.
  std::vector<Track> tracks;
  for (std::size_t s = 0; s < S; ++s) {
    const std::vector<Cluster> clusters = bipolar_clusters(rho[s], config.threshold, merge_gap);
    std::vector<bool> taken(tracks.size(), false);
    for (const Cluster& c : clusters) {
      std::size_t best = tracks.size();
      double best_d = link_radius;
      for (std::size_t k = 0; k < tracks.size(); ++k) {
        if (taken[k] || times[s] - times[tracks[k].samples.back()] > config.max_gap_time) continue;
        const double d = std::abs(tracks[k].positions.back() - c.center);
        if (d <= best_d) {
          best_d = d;
          best = k;
        }
      }
      if (best == tracks.size()) {
        tracks.emplace_back();
        taken.push_back(false);
      }
      taken[best] = true;
      tracks[best].samples.push_back(s);
      tracks[best].positions.push_back(c.center);
    }
  }

  BreatherReport report;
  const double span = times.back() - times.front();
  const double half_window = config.window_widths * imprint.width;
  double longest = 0.0;
  for (const Track& tr : tracks) {
    const double lifetime = times[tr.samples.back()] - times[tr.samples.front()];
    if (lifetime < config.min_track_fraction * span) continue;

    // Contrast in a window following the track, interpolated across dips.
    std::vector<double> tt, series;
    std::size_t k = 0;
    for (std::size_t s = tr.samples.front(); s <= tr.samples.back(); ++s) {
      while (k + 1 < tr.samples.size() && tr.samples[k + 1] <= s) ++k;
      double x = tr.positions[k];
      if (k + 1 < tr.samples.size() && tr.samples[k] < s) {
        const double a = static_cast<double>(s - tr.samples[k]) / static_cast<double>(tr.samples[k + 1] - tr.samples[k]);
        x += a * (tr.positions[k + 1] - tr.positions[k]);
      }
      const long lo = std::max(0L, std::lround(x - half_window));
      const long hi = std::min(static_cast<long>(L) - 1, std::lround(x + half_window));
      const auto [mn, mx] = std::minmax_element(rho[s].begin() + lo, rho[s].begin() + hi + 1);
      tt.push_back(times[s]);
      // Minima of the contrast, where the pair momentarily annihilates, are sharp.
      series.push_back(*mn - *mx);
    }
    const PeriodStats ps = periods_of(tt, series);
    if (ps.cycles < 2) continue;  // localized but not oscillating
    if (ps.std > config.max_period_scatter * ps.mean) continue;

    std::vector<double> pt(tr.samples.size());
    for (std::size_t i = 0; i < pt.size(); ++i) pt[i] = times[tr.samples[i]];
    BreatherMode mode;
    double sum = 0.0;
    for (double x : tr.positions) sum += x;
    mode.center = sum / static_cast<double>(tr.positions.size());
    mode.speed = slope(pt, tr.positions);
    const auto [pmin, pmax] = std::minmax_element(tr.positions.begin(), tr.positions.end());
    mode.first_site = static_cast<int>(std::floor(*pmin));
    mode.last_site = static_cast<int>(std::ceil(*pmax));
    mode.period_mean = ps.mean;
    mode.period_std = ps.std;
    mode.cycles = ps.cycles;
    report.modes.push_back(mode);
    if (lifetime > longest) {
      longest = lifetime;
      report.period_mean = ps.mean;
      report.period_std = ps.std;
      report.cycles = ps.cycles;
    }
  }
  std::sort(report.modes.begin(), report.modes.end(),
            [](const BreatherMode& a, const BreatherMode& b) { return a.center < b.center; });
  for (const BreatherMode& m : report.modes) report.centers.push_back(m.center);
  report.count = report.modes.size();

  // Bright-dark separation from the global density extrema.
  std::vector<double> sep(S);
  for (std::size_t s = 0; s < S; ++s) {
    const auto [lo, hi] = std::minmax_element(rho[s].begin(), rho[s].end());
    sep[s] = std::abs(static_cast<double>(hi - lo));
  }
  report.extrema_separation = sep.back();
  const std::size_t tail = S - S / 4;
  const double limit = config.dissociation_widths * imprint.width;
  bool apart = true;
  for (std::size_t s = tail; s < S; ++s) apart = apart && sep[s] > limit;
  const std::vector<double> ts_t(times.begin() + tail, times.end());
  const std::vector<double> ts(sep.begin() + tail, sep.end());
  report.verdict = apart && slope(ts_t, ts) > 0.0 ? BreatherVerdict::dissociated : BreatherVerdict::bound;
  return report;
}

BreatherRun run_breather(const PhaseImprint& imprint, const ModelParams& params, const BreatherConfig& config) {
  params.validate();
  config.integrator.validate();
  if (!(config.sample_interval > 0.0)) throw Error(ErrorCode::ParamDomain, "sample_interval must be positive");
  if (!(config.phase_noise >= 0.0)) throw Error(ErrorCode::ParamDomain, "phase_noise must be >= 0");
  LatticeState initial = phase_imprint(LatticeState::uniform(params.L, 0.5), imprint);
  if (config.phase_noise > 0.0) {
    std::mt19937_64 rng(config.seed);
    std::uniform_real_distribution<double> kick(-config.phase_noise, config.phase_noise);
    for (double& p : initial.phi) p += kick(rng);
  }

  const std::size_t stride = std::max<std::size_t>(1, std::llround(config.sample_interval / config.integrator.dt));
  std::vector<double> times;
  std::vector<std::vector<double>> rho;
  EvolveHooks hooks;
  hooks.on_step = [&](const LatticeState& s, std::size_t n) {
    if (n % stride != 0 || s.time < config.transient) return;
    times.push_back(s.time);
    std::vector<double> row(s.size());
    for (std::size_t j = 0; j < s.size(); ++j) row[j] = density_of(s.delta[j]);
    rho.push_back(std::move(row));
  };
  BreatherRun out;
  out.trajectory = evolve(initial, params, config.integrator, hooks);
  out.report = analyze_breather(times, rho, imprint, config);
  return out;
}

}  // namespace hcb
