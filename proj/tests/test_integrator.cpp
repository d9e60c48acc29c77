#include <cmath>
#include <vector>

#include "doctest.h"
#include "hcb/error.hpp"
#include "hcb/integrator.hpp"
#include "hcb/soliton.hpp"

using namespace hcb;

namespace {

ModelParams params_for(int L, Boundary b = Boundary::open) {
  ModelParams p;
  p.L = L;
  p.V = 0.9;
  p.boundary = b;
  return p;
}

LatticeState bright_soliton(const ModelParams& p, double rho0 = 0.45, double vbar = 0.5) {
  const SolitonSpec spec{Species::bright, rho0, vbar, p.L / 2.0 - 0.3};
  return build_state(std::vector<SolitonSpec>{spec}, p).state;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) m = std::max(m, std::abs(a[j] - b[j]));
  return m;
}

}  // namespace

TEST_CASE("integrator config domain") {
  IntegratorConfig c;
  CHECK_NOTHROW(c.validate());
  c.dt = 0.06;
  CHECK_THROWS_AS(c.validate(), Error);
  c.dt = 0.0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = IntegratorConfig{};
  c.frame_stride = 0;
  CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("step keeps the half-filled fixed point") {
  const ModelParams p = params_for(32, Boundary::periodic);
  const LatticeState s(32, 0.0, 0.4);
  const LatticeState n = step(s, p, 0.01);
  CHECK(n.time == doctest::Approx(0.01));
  CHECK(max_abs_diff(n.delta, s.delta) == 0.0);
  CHECK(max_abs_diff(n.phi, s.phi) < 1e-15);
}

TEST_CASE("uniform density: phase grows linearly at (t - V) delta0") {
  const ModelParams p = params_for(16, Boundary::periodic);
  const double delta0 = 0.3;
  IntegratorConfig c;
  c.dt = 0.01;
  c.t_end = 10.0;
  const Trajectory tr = evolve(LatticeState(16, delta0, 0.5), p, c);
  const Frame& last = tr.frames.back();
  CHECK(last.time == doctest::Approx(10.0));
  for (std::size_t j = 0; j < 16; ++j) {
    CHECK(std::abs(last.phi[j] - (0.5 + (p.t - p.V) * delta0 * 10.0)) < 1e-8);
    CHECK(last.delta[j] == delta0);
  }
}

TEST_CASE("RK4 error scales as dt^4") {
  const ModelParams p = params_for(80);
  const LatticeState s0 = bright_soliton(p);
  const double horizon = 2.0;
  auto run = [&](double dt) {
    LatticeState s = s0;
    Rk4Stepper stepper(s.size());
    const int n = static_cast<int>(std::lround(horizon / dt));
    for (int i = 0; i < n; ++i) stepper.step(s, p, dt);
    return s;
  };
  const LatticeState ref = run(0.2 / 16.0);
  const double e1 = max_abs_diff(run(0.2).delta, ref.delta);
  const double e2 = max_abs_diff(run(0.1).delta, ref.delta);
  const double ratio = e1 / e2;
  MESSAGE("error ratio for dt halving: " << ratio);
  CHECK(ratio > 12.0);
  CHECK(ratio < 20.0);
}

TEST_CASE("evolve records frames on a uniform grid") {
  const ModelParams p = params_for(32, Boundary::periodic);
  IntegratorConfig c;
  c.dt = 0.01;
  c.t_end = 1.0;
  c.frame_stride = 10;
  std::size_t seen = 0;
  EvolveHooks hooks;
  hooks.on_frame = [&](const Frame&, const Observables&) { ++seen; };
  const Trajectory tr = evolve(LatticeState(32, 0.1), p, c, hooks);
  CHECK(tr.frames.size() == 11);
  CHECK(seen == 11);
  for (std::size_t i = 1; i < tr.frames.size(); ++i) CHECK(tr.frames[i].time > tr.frames[i - 1].time);
  CHECK(tr.diagnostics.size() == tr.frames.size());
}

TEST_CASE("zero-length evolution returns the input as a single frame") {
  const ModelParams p = params_for(32, Boundary::periodic);
  LatticeState s(32, 0.2, 0.1);
  s.time = 3.0;
  IntegratorConfig c;
  c.t_end = 3.0;
  const Trajectory tr = evolve(s, p, c);
  REQUIRE(tr.frames.size() == 1);
  CHECK(tr.frames[0].time == 3.0);
  CHECK(tr.frames[0].delta == s.delta);
  CHECK(tr.frames[0].phi == s.phi);
}

TEST_CASE("half filling conserves number and energy over t = 100") {
  const ModelParams p = params_for(64, Boundary::periodic);
  IntegratorConfig c;
  c.t_end = 100.0;
  c.frame_stride = 2000;
  const Trajectory tr = evolve(LatticeState(64, 0.0, 0.0), p, c);
  const auto& first = tr.diagnostics.front();
  const auto& last = tr.diagnostics.back();
  CHECK(std::abs(last.particle_number - first.particle_number) < 1e-10);
  CHECK(std::abs(last.energy - first.energy) < 1e-8);
}

TEST_CASE("soliton run conserves number and energy over 10^4 steps at dt = 0.01") {
  const ModelParams p = params_for(200);
  IntegratorConfig c;
  c.dt = 0.01;
  c.t_end = 100.0;
  c.frame_stride = 1000;
  const Trajectory tr = evolve(bright_soliton(p, 0.45, 0.85), p, c);
  const auto& first = tr.diagnostics.front();
  const auto& last = tr.diagnostics.back();
  CHECK(std::abs(last.particle_number - first.particle_number) < 1e-10);
  CHECK(std::abs(last.energy - first.energy) / std::abs(first.energy) < 1e-7);
}

TEST_CASE("conservation breach aborts the run") {
  const ModelParams p = params_for(100);
  IntegratorConfig c;
  c.dt = 0.05;
  c.t_end = 20.0;
  c.check_stride = 1;
  c.tolerances.energy = 1e-16;
  CHECK_THROWS_AS(evolve(bright_soliton(p), p, c), ConservationBreach);
}

TEST_CASE("non-finite update is reported") {
  const ModelParams p = params_for(100);
  LatticeState s = bright_soliton(p);
  Rk4Stepper stepper(s.size());
  try {
    stepper.step(s, p, 1e300);
    FAIL("expected NonFinite");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonFinite);
  }
}

TEST_CASE("time reversal under phi -> -phi") {
  const ModelParams p = params_for(120);
  const LatticeState s0 = bright_soliton(p);
  IntegratorConfig c;
  c.dt = 0.005;
  c.t_end = 20.0;
  c.frame_stride = 100000;
  LatticeState mid = evolve(s0, p, c).state_at(1);
  for (double& x : mid.phi) x = -x;
  mid.time = 0.0;
  const LatticeState back = evolve(mid, p, c).state_at(1);
  CHECK(max_abs_diff(back.delta, s0.delta) < 1e-6);
}

TEST_CASE("particle-hole conjugate trajectories mirror each other") {
  const ModelParams p = params_for(100, Boundary::open);
  const LatticeState a0 = bright_soliton(p, 0.3, 0.5);
  LatticeState b0 = a0;
  for (std::size_t j = 0; j < a0.size(); ++j) {
    b0.delta[j] = -a0.delta[j];
    b0.phi[j] = -a0.phi[j];
  }
  IntegratorConfig c;
  c.t_end = 20.0;
  c.frame_stride = 1000;
  const Trajectory ta = evolve(a0, p, c);
  const Trajectory tb = evolve(b0, p, c);
  REQUIRE(ta.frames.size() == tb.frames.size());
  for (std::size_t f = 0; f < ta.frames.size(); ++f) {
    for (std::size_t j = 0; j < a0.size(); ++j) {
      CHECK(std::abs(ta.frames[f].delta[j] + tb.frames[f].delta[j]) < 1e-8);
      CHECK(std::abs(ta.frames[f].phi[j] + tb.frames[f].phi[j]) < 1e-8);
    }
  }
}
