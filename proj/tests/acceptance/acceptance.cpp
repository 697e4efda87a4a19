// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "kawahara/convergence.hpp"
#include "kawahara/diagnostics.hpp"
#include "kawahara/parallel.hpp"
#include "kawahara/spectral.hpp"

using namespace kawahara;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

model::SystemParams run1_params() { return {1.0, 1.0, 2, 0.3, 0.3, 1.0, 3.0}; }

timeloop::InitialData scaled_bump(const model::SystemParams& p, const spatial::Grid& grid,
                                  double dt, double target_norm) {
  const double L = p.L;
  auto shape = [L](double x) { return std::pow(x * (L - x), 3); };
  auto zero = [](double) { return 0.0; };
  const auto line = timeloop::init_delay_line(zero, p.h, dt);
  const double n2 = diagnostics::energy(spatial::sample_interior(grid, shape), line, grid, p);
  const double s = target_norm / std::sqrt(n2);
  return {[shape, s](double x) { return s * shape(x); }, zero};
}

// Shared by criteria 1 and 2.
struct Run1 {
  timeloop::RunRecord run;
  double mu1 = 0, mu2 = 0, lambda = 0, seconds = 0;
};

const Run1& run1() {
  static const Run1 r = [] {
    Run1 out;
    const auto p = run1_params();
    const auto t0 = std::chrono::steady_clock::now();
    const auto [mu1, mu2] = model::default_weights(p);
    const double radius = 0.5 * model::smallness_radius(p);
    out.mu1 = mu1;
    out.mu2 = mu2;
    out.lambda = model::decay_certificate(p, mu1, mu2, radius).lambda;
    timeloop::SimulationOptions opt;
    opt.T = 20;
    opt.N = 300;
    opt.dt = 1e-3;
    opt.mode = timeloop::Mode::nonlinear;
    opt.mu1 = mu1;
    opt.mu2 = mu2;
    const auto grid = spatial::build_grid(p.L, opt.N);
    out.run = timeloop::simulate(p, scaled_bump(p, grid, opt.dt, radius), opt);
    out.seconds = seconds_since(t0);
    return out;
  }();
  return r;
}

Verdict criterion1() {
  const auto& r = run1();
  const auto& s = r.run.series;
  const double E0 = s.front().E;
  bool positive = true, monotone = true;
  for (std::size_t k = 0; k < s.size(); ++k) {
    positive = positive && s[k].E > 0;
    // below 1e-9 E0 the energy sits at the round-off floor of the scheme
    if (k > 0 && s[k - 1].E > 1e-9 * E0 && s[k].E > s[k - 1].E * (1 + 1e-12)) monotone = false;
  }
  const auto fit = diagnostics::fit_exponential(s, 4.0, 20.0);
  const double need = 2 * r.lambda * 0.9;
  Verdict v;
  v.pass = positive && monotone && s.back().E < E0 && fit.gamma >= need && r.seconds < 60;
  v.detail = fmt("gamma=%.4g", fit.gamma) + fmt(" >= 0.9*2*lambda_cert=%.4g", need) +
             fmt(", E(T)/E(0)=%.3g", s.back().E / E0) + (monotone ? ", monotone" : ", NOT monotone") +
             fmt(", %.1f s", r.seconds);
  return v;
}

Verdict criterion2() {
  const auto& r = run1();
  const auto p = run1_params();
  std::size_t bad = 0;
  double worst = 0;
  for (const auto& rec : r.run.series) {
    const auto sw = diagnostics::sandwich_check(rec.E, rec.V, p, r.mu1, r.mu2);
    if (!sw.ok) ++bad;
    worst = std::min({worst, sw.lower_slack / rec.E, sw.upper_slack / rec.E});
  }
  Verdict v;
  v.pass = bad == 0 && !r.run.series.empty();
  v.detail = std::to_string(r.run.series.size()) + " states, " + std::to_string(bad) +
             " violations" + fmt(", min relative slack %.3g", worst);
  return v;
}

diagnostics::DissipationReport dissipation_run(int N, double dt) {
  const auto p = run1_params();
  timeloop::SimulationOptions opt;
  opt.T = 3;
  opt.N = N;
  opt.dt = dt;
  opt.mode = timeloop::Mode::linear;
  const double L = p.L;
  timeloop::InitialData ic{[L](double x) { return 0.3 * std::pow(x * (L - x), 3); },
                           [](double) { return 0.0; }};
  return diagnostics::dissipation_check(timeloop::simulate(p, ic, opt), p);
}

Verdict criterion3() {
  const auto coarse = dissipation_run(300, 1e-3);
  const auto fine = dissipation_run(600, 5e-4);
  const double ratio = coarse.max_mismatch / fine.max_mismatch;
  const double rel = fine.max_mismatch / fine.max_eta_sq;
  Verdict v;
  v.pass = ratio >= 3 && rel < 1e-3;
  v.detail = fmt("refinement ratio %.3g", ratio) + fmt(", fine mismatch/max|eta|^2 = %.3g", rel) +
             fmt(" (endpoint quadrature: ratio %.3g)",
                 coarse.max_mismatch_endpoint / fine.max_mismatch_endpoint);
  return v;
}

Verdict criterion4() {
  const auto p = run1_params();
  const int N = 300;
  const double dt = 1e-3, T = 5;
  const auto grid = spatial::build_grid(p.L, N);
  std::vector<timeloop::RunRecord> runs(20);
  parallel_for(runs.size(), [&](std::size_t i) {
    timeloop::SimulationOptions opt;
    opt.T = T;
    opt.N = N;
    opt.dt = dt;
    opt.mode = timeloop::Mode::linear;
    runs[i] = timeloop::simulate(p, diagnostics::observability_sample(p, grid, dt, 20240, i), opt);
  });
  int passed = 0;
  double worst = 0;
  bool injection_caught = true;
  for (auto& run : runs) {
    const auto rep = diagnostics::trace_estimate_check(run, p, T, 0.05);
    passed += rep.passed;
    worst = std::max(worst, rep.lhs / rep.rhs);
    // inject a violation: inflate the traces until the left side exceeds the bound
    const double factor = std::sqrt(1.2 * rep.rhs / rep.lhs);
    for (auto& rec : run.series) {
      rec.trace0 *= factor;
      rec.z1 *= factor;
    }
    injection_caught = injection_caught && !diagnostics::trace_estimate_check(run, p, T, 0.05).passed;
  }
  Verdict v;
  v.pass = passed == 20 && injection_caught;
  v.detail = std::to_string(passed) + "/20 within bound" + fmt(", max lhs/rhs %.3g", worst) +
             (injection_caught ? ", injected violations detected" : ", injection NOT detected");
  return v;
}

Verdict criterion5() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto m = verification::cubic_bump(run1_params());
  verification::ConvergenceOptions opt;
  const auto rep = verification::convergence_study(m, opt);
  const double secs = seconds_since(t0);
  bool ok = secs < 300;
  std::string detail = "space orders";
  for (double o : rep.space_orders) {
    ok = ok && o >= 1.8;
    detail += fmt(" %.3g", o);
  }
  detail += ", time orders";
  for (double o : rep.time_orders) {
    ok = ok && o >= 1.8;
    detail += fmt(" %.3g", o);
  }
  Verdict v;
  v.pass = ok && rep.space_orders.size() == 2 && rep.time_orders.size() == 1;
  v.detail = detail + fmt(", %.1f s", secs);
  return v;
}

Verdict criterion6() {
  // exactness through the integrator; z1 at step K is still the initial history
  const auto p = run1_params();
  timeloop::SimulationOptions opt;
  opt.T = 3;
  opt.N = 200;
  opt.dt = 1e-3;
  opt.mode = timeloop::Mode::linear;
  const auto grid = spatial::build_grid(p.L, opt.N);
  const auto run = timeloop::simulate(p, scaled_bump(p, grid, opt.dt, 1.0), opt);
  const auto& s = run.series;
  const std::size_t K = timeloop::delay_steps(p.h, opt.dt);
  std::size_t mismatches = 0, compared = 0;
  for (std::size_t n = K + 1; n < s.size(); ++n, ++compared)
    if (s[n].z1 != s[n - K].trace0) ++mismatches;

  // upwind transport of a smooth boundary signal against the ring buffer
  constexpr double pi = std::numbers::pi;
  auto signal = [](double t) { return std::sin(2 * pi * t) + 0.5 * std::cos(5 * t); };
  const double ds = 2 * pi + 2.5, dss = 4 * pi * pi + 12.5;  // bounds on |s'|, |s''|
  auto upwind_error = [&](int cells) {
    auto line = timeloop::init_delay_line(signal, p.h, opt.dt);
    timeloop::UpwindTransport up(p.h, cells, [&](double rho) { return signal(-p.h * rho); });
    double err = 0;
    for (int k = 1; k <= 3000; ++k) {
      const double v = signal(k * opt.dt);
      line.push(v);
      up.advance(opt.dt, v);
      err = std::max(err, std::abs(up.outflow() - line.sample(1.0)));
    }
    return err;
  };
  const double e64 = upwind_error(64), e128 = upwind_error(128);
  const double bound = (1.0 / 64) * (p.h * ds + p.h * p.h * dss);
  Verdict v;
  v.pass = K == 1000 && mismatches == 0 && compared > 0 && e64 <= bound && e64 / e128 > 1.6;
  v.detail = std::to_string(compared) + " delayed traces bit-identical, " +
             std::to_string(mismatches) + " mismatches" + fmt("; upwind 64 cells err %.3g", e64) +
             fmt(" (O(drho) bound %.3g", bound) + fmt(", 64->128 ratio %.3g)", e64 / e128);
  return v;
}

Verdict criterion7() {
  const double rho = std::sqrt((std::sqrt(5.0) - 1) / 2), k = std::sqrt((1 + std::sqrt(5.0)) / 2);
  const std::vector<spectral::cplx> expected{0, rho, -rho, {0, k}, {0, -k}};
  const auto s0 = spectral::q_roots(0);
  double err0 = 0;
  for (const auto& e : expected) {
    double best = 1e300;
    for (const auto& r : s0.roots) best = std::min(best, std::abs(r - e));
    err0 = std::max(err0, best);
  }
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-3, 3);
  double worst = 0;
  for (int i = 0; i < 200; ++i) {
    const double r = u(rng);
    const auto s = spectral::q_roots(r);
    spectral::cplx sum = 0, prod = 1;
    for (const auto& z : s.roots) {
      sum += z;
      prod *= z;
    }
    worst = std::max({worst, std::abs(sum), std::abs(prod + r)});
  }
  Verdict v;
  v.pass = err0 < 1e-10 && worst < 1e-10;
  v.detail = fmt("r=0 root error %.3g", err0) + fmt(", max sum/product defect %.3g", worst);
  return v;
}

Verdict criterion8() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto s = spectral::spectral_scan(-2, 2, 0.1, 20, 100, 100);
  const double secs = seconds_since(t0);
  Verdict v;
  v.pass = s.min_mobius > 1e-6 && s.min_sigma_min > 1e-8 && s.min_sigma5 > 1e-8 && secs < 120;
  v.detail = fmt("min mobius %.3g", s.min_mobius) + fmt(", min sigma_min %.3g", s.min_sigma_min) +
             fmt(", min sigma5 %.3g", s.min_sigma5) + ", " + std::to_string(s.excluded) +
             " cells excluded" + fmt(", %.2f s", secs);
  return v;
}

Verdict criterion9() {
  const auto hits = spectral::find_critical_lengths(1e-3, 50);
  bool ok = !hits.empty();
  double mem = 0, ode = 0, bc = 0;
  for (const auto& h : hits) {
    mem = std::max(mem, h.membership_residual);
    ode = std::max(ode, h.ode_residual);
    for (double b : h.bc_residuals) bc = std::max(bc, b);
    ok = ok && h.max_abs_u > 0;
  }
  ok = ok && mem < 1e-12 && ode < 1e-6 && bc < 1e-8;
  Verdict v;
  v.pass = ok;
  v.detail = std::to_string(hits.size()) + " hits" +
             (hits.empty() ? std::string() : fmt(", first L=%.6f", hits.front().L)) +
             fmt(", max membership %.3g", mem) + fmt(", ode %.3g", ode) + fmt(", bc %.3g", bc);
  return v;
}

Verdict criterion10() {
  const auto p = run1_params();
  diagnostics::ObservabilityOptions coarse, fine;
  coarse.N = 300;
  fine.N = 600;
  const auto a = diagnostics::observability_estimate(p, 2 * p.h, 50, 2024, coarse);
  const auto b = diagnostics::observability_estimate(p, 2 * p.h, 50, 2024, fine);
  const double drift = std::abs(b.C_emp - a.C_emp) / a.C_emp;
  Verdict v;
  v.pass = std::isfinite(a.C_emp) && a.suspected_failures == 0 && a.nu_emp > 0 &&
           a.decay_consistent && b.decay_consistent && drift <= 0.1;
  v.detail = fmt("C_emp %.5g", a.C_emp) + fmt(" (N=600: %.5g", b.C_emp) +
             fmt(", drift %.2g)", drift) + fmt(", nu_emp %.4g", a.nu_emp) +
             (a.decay_consistent ? ", E(T) <= gamma E(0) for all samples" : ", decay bound violated");
  return v;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
      {"Lyapunov decay reproduction", criterion1},
      {"sandwich exactness", criterion2},
      {"linear dissipation identity", criterion3},
      {"trace estimate", criterion4},
      {"convergence orders", criterion5},
      {"delay exactness", criterion6},
      {"spectral closed forms", criterion7},
      {"non-existence audit", criterion8},
      {"critical set", criterion9},
      {"observability probe", criterion10},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failures += !v.pass;
    std::printf("criterion %2zu %s  %s: %s\n", i + 1, v.pass ? "PASS" : "FAIL", criteria[i].first,
                v.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
