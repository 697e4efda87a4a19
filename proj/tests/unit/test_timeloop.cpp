#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "kawahara/convergence.hpp"
#include "kawahara/error.hpp"
#include "kawahara/functionals.hpp"
#include "kawahara/timeloop.hpp"

using namespace kawahara;
using namespace kawahara::timeloop;
using doctest::Approx;

namespace {
constexpr double pi = std::numbers::pi;

model::SystemParams example() { return {1.0, 1.0, 2, 0.3, 0.3, 1.0, 3.0}; }

InitialData bump(double amp, double L) {
  return {[amp, L](double x) { return amp * std::pow(x * (L - x), 3); },
          [](double) { return 0.0; }};
}
}  // namespace

TEST_CASE("delay line sampling") {
  const auto c = init_delay_line([](double) { return 1.5; }, 1.0, 0.1);
  for (double rho : {0.0, 0.13, 0.5, 0.99, 1.0}) CHECK(c.sample(rho) == 1.5);

  const auto lin = init_delay_line([](double s) { return s; }, 1.0, 0.25);
  CHECK(lin.sample(0.5) == -0.5);
  CHECK(lin.sample(1.0) == -1.0);
  CHECK(lin.sample(0.0) == 0.0);
  CHECK(lin.t_current() == 0.0);
  CHECK(lin.steps_per_delay() == 4);

  CHECK_THROWS_AS(init_delay_line([](double) { return 0.0; }, 1.0, 2.0), Error);
  CHECK_THROWS_AS(delay_steps(1.0, 2.0), Error);
  CHECK(delay_steps(1.0, 0.3) == 4);
  CHECK(delay_steps(1.0, 1e-3) == 1000);

  // non-integer ratio: interpolated closing node at rho = 1
  const auto odd = init_delay_line([](double s) { return 2 * s; }, 1.0, 0.3);
  CHECK(odd.sample(1.0) == Approx(-2.0));
  const auto prof = odd.profile();
  CHECK(prof.back().first == Approx(1.0));
  CHECK(prof.front().first == 0.0);
}

TEST_CASE("feedback value") {
  const auto zero = init_delay_line([](double) { return -1.0; }, 1.0, 0.1);
  CHECK(feedback_value(zero, 0, 0, 3.0) == 0.0);
  CHECK(feedback_value(zero, 1, 0, 2.5) == 2.5);
  CHECK(feedback_value(zero, 0.3, 0.3, 1.0) == Approx(0.0));
}

TEST_CASE("ring buffer is an exact shift") {
  const double h = 1.0, dt = 1e-3;
  auto line = init_delay_line([](double) { return 0.0; }, h, dt);
  REQUIRE(line.steps_per_delay() == 1000);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0, 1);
  std::vector<double> pushed;
  for (int k = 0; k < 3000; ++k) {
    pushed.push_back(n(rng));
    line.push(pushed.back());
    if (pushed.size() > 1000) {
      const double delayed = pushed[pushed.size() - 1 - 1000];
      CHECK(line.sample(1.0) == delayed);
      CHECK(line.value_at_lag(1000.0) == delayed);
    }
  }
}

TEST_CASE("upwind transport converges to the ring buffer") {
  const double h = 1.0, dt = 1e-3;
  auto signal = [](double t) { return std::sin(2 * pi * t) + 0.5 * std::cos(5 * t); };
  auto history = [&](double s) { return signal(s); };
  auto run = [&](int cells) {
    auto line = init_delay_line(history, h, dt);
    UpwindTransport up(h, cells, [&](double rho) { return history(-h * rho); });
    double err = 0;
    for (int k = 1; k <= 3000; ++k) {
      const double v = signal(k * dt);
      line.push(v);
      up.advance(dt, v);
      for (double rho : {0.25, 0.5, 1.0}) err = std::max(err, std::abs(up.at(rho) - line.sample(rho)));
    }
    return err;
  };
  const double e64 = run(64), e128 = run(128);
  // first-order upwind: error bounded by drho (h max|s'| + h^2 max|s''|)
  CHECK(e64 < (1.0 / 64) * (2 * pi + 2.5 + 4 * pi * pi + 12.5));
  CHECK(e64 / e128 > 1.6);
}

TEST_CASE("zero data stays zero") {
  SimulationOptions opt;
  opt.T = 0.5;
  opt.N = 64;
  opt.dt = 1e-2;
  const auto run = simulate(example(), bump(0, 3), opt);
  for (const auto& r : run.series) CHECK(r.E == 0.0);
  CHECK(run.u_final.norm() == 0.0);
}

TEST_CASE("T = 0 records only the initial state") {
  SimulationOptions opt;
  opt.T = 0.0;
  opt.N = 64;
  const auto run = simulate(example(), bump(0.1, 3), opt);
  REQUIRE(run.series.size() == 1);
  CHECK(run.series[0].t == 0.0);
}

TEST_CASE("linear flow without feedback dissipates") {
  auto p = example();
  p.alpha = p.beta = 0;
  for (auto scheme : {Scheme::crank_nicolson, Scheme::bdf2}) {
    SimulationOptions opt;
    opt.T = 2;
    opt.N = 128;
    opt.dt = 1e-3;
    opt.mode = Mode::linear;
    opt.scheme = scheme;
    const auto run = simulate(p, bump(0.1, 3), opt);
    const double E0 = run.series.front().E;
    double worst = 0;
    for (std::size_t k = 1; k < run.series.size(); ++k)
      worst = std::max(worst, run.series[k].E - run.series[k - 1].E);
    CHECK(worst <= 1e-6 * E0);
    CHECK(run.series.back().E < E0);
  }
}

TEST_CASE("small nonlinear data decays") {
  SimulationOptions opt;
  opt.T = 3;
  opt.N = 128;
  opt.dt = 2e-3;
  opt.mu1 = 0.1;
  opt.mu2 = 0.1;
  const auto run = simulate(example(), bump(0.05, 3), opt);
  CHECK(run.series.back().E < run.series.front().E);
  CHECK(run.has_lyapunov);
  for (const auto& r : run.series) CHECK(diagnostics::sandwich_check(r.E, r.V, example(), 0.1, 0.1).ok);
  CHECK(run.warnings.empty());
}

TEST_CASE("warnings and preconditions") {
  SimulationOptions opt;
  opt.T = 0.1;
  opt.N = 64;
  opt.dt = 1e-2;
  InitialData bad{[](double x) { return 0.01 * x; }, [](double) { return 0.0; }};
  const auto run = simulate(example(), bad, opt);
  CHECK_FALSE(run.warnings.empty());
  CHECK_FALSE(check_compatibility(bad, 3).ok);
  CHECK(check_compatibility(bump(1, 3), 3).ok);

  auto p = example();
  p.alpha = 0.6;
  p.beta = 0.5;
  CHECK_THROWS_AS(simulate(p, bump(0.1, 3), opt), Error);
  opt.record_stride = 0;
  CHECK_THROWS_AS(simulate(example(), bump(0.1, 3), opt), Error);
}

TEST_CASE("record stride and snapshots") {
  SimulationOptions opt;
  opt.T = 1;
  opt.N = 64;
  opt.dt = 1e-2;
  opt.record_stride = 7;
  opt.snapshot_times = {0.0, 0.5, 2.0};
  const auto run = simulate(example(), bump(0.1, 3), opt);
  CHECK(run.series.back().t == Approx(1.0));
  CHECK(run.series.size() == 1 + 100 / 7 + 1);
  CHECK(run.snapshots.size() == 2);
  CHECK(run.warnings.size() == 1);
}

TEST_CASE("startup steps are flagged") {
  SimulationOptions opt;
  opt.T = 0.1;
  opt.N = 64;
  opt.dt = 1e-2;
  opt.startup_steps = 3;
  const auto run = simulate(example(), bump(0.1, 3), opt);
  CHECK(run.series[1].startup);
  CHECK(run.series[3].startup);
  CHECK_FALSE(run.series[4].startup);
}

TEST_CASE("samples round trip through piecewise-linear profiles") {
  const auto ic = InitialData::from_samples({0, 1, 0}, 2.0, {3, 5}, 1.0);
  CHECK(ic.u0(1.0) == 1.0);
  CHECK(ic.u0(0.5) == Approx(0.5));
  CHECK(ic.z0(-0.5) == Approx(4.0));
}

TEST_CASE("manufactured solution: temporal order") {
  const auto m = verification::cubic_bump(example());
  verification::ConvergenceOptions opt;
  opt.T = 0.5;
  opt.space_N = {};
  opt.time_N = 128;
  const auto rep = verification::convergence_study(m, opt);
  REQUIRE(rep.time_orders.size() == 1);
  CHECK(rep.time_orders[0] >= 1.8);
}

TEST_CASE("enum names round trip") {
  for (auto s : {Scheme::crank_nicolson, Scheme::bdf2}) CHECK(scheme_from_string(to_string(s)) == s);
  for (auto m : {Mode::linear, Mode::nonlinear}) CHECK(mode_from_string(to_string(m)) == m);
  for (auto c : {Coupling::implicit, Coupling::lagged})
    CHECK(coupling_from_string(to_string(c)) == c);
  CHECK(scheme_from_string("cn") == Scheme::crank_nicolson);
  CHECK_THROWS_AS(mode_from_string("quadratic"), Error);
}
