#include "kawahara/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "kawahara/error.hpp"
#include "kawahara/parallel.hpp"

namespace kawahara::diagnostics {

double energy(const timeloop::SimState& state, const spatial::Grid& grid,
              const model::SystemParams& params) {
  return energy(state.u, state.line, grid, params);
}

double lyapunov(const timeloop::SimState& state, const spatial::Grid& grid,
                const model::SystemParams& params, double mu1, double mu2) {
  return lyapunov(state.u, state.line, grid, params, mu1, mu2);
}

DecayFit fit_exponential(std::span<const std::pair<double, double>> series, double t_a,
                         double t_b) {
  double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
  std::size_t n = 0;
  for (const auto& [t, E] : series) {
    if (t < t_a || t > t_b || !(E > 0.0)) continue;
    const double y = std::log(E);
    st += t;
    sy += y;
    stt += t * t;
    sty += t * y;
    ++n;
  }
  if (n < 10)
    throw Error(ErrorKind::precondition,
                "fit_exponential needs at least 10 positive samples in the window, got " +
                    std::to_string(n));
  const double dn = static_cast<double>(n);
  const double denom = dn * stt - st * st;
  if (!(denom > 0.0)) throw Error(ErrorKind::precondition, "fit window has no time spread");
  const double slope = (dn * sty - st * sy) / denom;
  const double intercept = (sy - slope * st) / dn;

  double ss = 0.0;
  for (const auto& [t, E] : series) {
    if (t < t_a || t > t_b || !(E > 0.0)) continue;
    const double r = std::log(E) - (intercept + slope * t);
    ss += r * r;
  }
  DecayFit fit;
  fit.C = std::exp(intercept);
  fit.gamma = -slope;
  fit.residual = std::sqrt(ss / dn);
  fit.t_a = t_a;
  fit.t_b = t_b;
  fit.samples = n;
  return fit;
}

DecayFit fit_exponential(const std::vector<timeloop::EnergyRecord>& series, double t_a,
                         double t_b) {
  std::vector<std::pair<double, double>> pairs;
  pairs.reserve(series.size());
  for (const auto& rec : series) pairs.emplace_back(rec.t, rec.E);
  return fit_exponential(pairs, t_a, t_b);
}

double trace_estimate_constant(const model::SystemParams& params, double T) {
  const double ab = std::abs(params.beta);
  if (ab == 0.0) return std::numeric_limits<double>::infinity();
  const double delay_factor = 1.0 + 1.0 / (params.h * ab);
  const double gains = params.alpha * params.alpha + params.beta * params.beta;
  return (T + 1.0) * delay_factor / (1.0 - gains) + (T + 1.0) * delay_factor;
}

TraceEstimateReport trace_estimate_check(const timeloop::RunRecord& run,
                                         const model::SystemParams& params, double T,
                                         double slack) {
  if (run.mode != timeloop::Mode::linear)
    throw Error(ErrorKind::refused, "trace estimate applies to linear-mode runs only");
  TraceEstimateReport report;
  report.slack = slack;
  const auto& s = run.series;
  for (std::size_t k = 1; k < s.size() && s[k].t <= T * (1.0 + 1e-12); ++k) {
    const double f0 = s[k - 1].trace0 * s[k - 1].trace0 + s[k - 1].z1 * s[k - 1].z1;
    const double f1 = s[k].trace0 * s[k].trace0 + s[k].z1 * s[k].z1;
    report.lhs += 0.5 * (s[k].t - s[k - 1].t) * (f0 + f1);
  }
  report.constant = trace_estimate_constant(params, T);
  const double data = run.u0_norm_sq + run.z0_norm_sq;
  report.rhs = data == 0.0 ? 0.0 : report.constant * data;
  report.passed = report.lhs <= report.rhs * (1.0 + slack);
  return report;
}

DissipationReport dissipation_check(const timeloop::RunRecord& run,
                                    const model::SystemParams& params) {
  if (run.mode != timeloop::Mode::linear)
    throw Error(ErrorKind::refused, "dissipation identity applies to linear-mode runs only");
  DissipationReport report;
  const auto M = model::gain_matrix_M(params.alpha, params.beta);
  const double ab = std::abs(params.beta);
  const auto& s = run.series;
  for (const auto& rec : s)
    report.max_eta_sq = std::max(report.max_eta_sq, rec.trace0 * rec.trace0 + rec.z1 * rec.z1);
  for (std::size_t k = 1; k < s.size(); ++k) {
    if (s[k].startup || s[k - 1].startup) continue;
    const double dt = s[k].t - s[k - 1].t;
    if (!(dt > 0.0)) continue;
    const double lhs = (s[k].E - s[k - 1].E) / (2.0 * dt);
    const double trace_mid = 0.5 * (s[k - 1].trace0 + s[k].trace0);
    const double z1_mid = 0.5 * (s[k - 1].z1 + s[k].z1);
    const double phi_mid = params.alpha * trace_mid + params.beta * z1_mid;
    const double transport =
        0.5 * ab * (s[k - 1].trace0 * s[k - 1].trace0 + s[k].trace0 * s[k].trace0 -
                    s[k - 1].z1 * s[k - 1].z1 - s[k].z1 * s[k].z1);
    const double rhs = 0.5 * (phi_mid * phi_mid - trace_mid * trace_mid + transport);
    const double rhs_endpoint = 0.25 * (M.quadratic_form(s[k - 1].trace0, s[k - 1].z1) +
                                        M.quadratic_form(s[k].trace0, s[k].z1));
    report.max_mismatch = std::max(report.max_mismatch, std::abs(lhs - rhs));
    report.max_mismatch_endpoint =
        std::max(report.max_mismatch_endpoint, std::abs(lhs - rhs_endpoint));
    ++report.intervals;
  }
  report.tolerance = (run.dt + run.grid.dx * run.grid.dx) * report.max_eta_sq;
  report.within_tolerance = report.max_mismatch <= report.tolerance;
  return report;
}

timeloop::InitialData observability_sample(const model::SystemParams& params,
                                           const spatial::Grid& grid, double dt,
                                           std::uint64_t seed, std::size_t index) {
  constexpr double pi = std::numbers::pi;
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> cu(8), cz(5);
  for (double& c : cu) c = normal(rng);
  for (double& c : cz) c = normal(rng);

  const double L = params.L, h = params.h;
  auto u_raw = [cu, L](double x) {
    double series = 0.0;
    for (std::size_t k = 0; k < cu.size(); ++k) {
      const double m = static_cast<double>(k + 1);
      series += cu[k] * std::sin(m * pi * x / L) / m;
    }
    const double envelope = x * (L - x);
    return envelope * envelope * series;
  };
  auto z_raw = [cz, h](double s) {
    double series = 0.0;
    for (std::size_t k = 0; k < cz.size(); ++k)
      series += cz[k] * std::cos(static_cast<double>(k) * pi * s / h) / static_cast<double>(k + 1);
    return series;
  };
  const auto line = timeloop::init_delay_line(z_raw, h, dt);
  const double norm_sq = energy(spatial::sample_interior(grid, u_raw), line, grid, params);
  const double scale = norm_sq > 0.0 ? 1.0 / std::sqrt(norm_sq) : 0.0;
  return {[u_raw, scale](double x) { return scale * u_raw(x); },
          [z_raw, scale](double s) { return scale * z_raw(s); }};
}

ObservabilityResult observability_estimate(const model::SystemParams& params, double T,
                                           int n_samples, std::uint64_t seed,
                                           const ObservabilityOptions& options) {
  if (!(T > params.h))
    throw Error(ErrorKind::precondition, "observability probe needs T > h");
  if (n_samples < 10)
    throw Error(ErrorKind::precondition, "observability probe needs at least 10 samples");
  const auto grid = spatial::build_grid(params.L, options.N);

  ObservabilityResult result;
  result.samples.resize(static_cast<std::size_t>(n_samples));
  parallel_for(result.samples.size(), [&](std::size_t i) {
    timeloop::SimulationOptions sim;
    sim.T = T;
    sim.N = options.N;
    sim.dt = options.dt;
    sim.mode = timeloop::Mode::linear;
    sim.scheme = options.scheme;
    const auto ic = observability_sample(params, grid, options.dt, seed, i);
    const auto run = timeloop::simulate(params, ic, sim);
    double output = 0.0;
    const auto& s = run.series;
    for (std::size_t k = 1; k < s.size(); ++k) {
      const double f0 = s[k - 1].trace0 * s[k - 1].trace0 + s[k - 1].z1 * s[k - 1].z1;
      const double f1 = s[k].trace0 * s[k].trace0 + s[k].z1 * s[k].z1;
      output += 0.5 * (s[k].t - s[k - 1].t) * (f0 + f1);
    }
    ObservabilitySample& sample = result.samples[i];
    const double E0 = s.front().E;
    sample.energy_ratio = s.back().E / E0;
    sample.suspected_failure = output < 1e-14 * E0;
    sample.ratio = sample.suspected_failure ? std::numeric_limits<double>::infinity()
                                            : E0 / output;
  });

  for (const auto& sample : result.samples) {
    if (sample.suspected_failure) {
      ++result.suspected_failures;
      continue;
    }
    result.C_emp = std::max(result.C_emp, sample.ratio);
  }
  result.gamma_emp = result.C_emp / (1.0 + result.C_emp);
  result.nu_emp = result.C_emp > 0.0 ? std::log(1.0 + 1.0 / result.C_emp) / T : 0.0;
  result.decay_consistent = std::all_of(
      result.samples.begin(), result.samples.end(),
      [&](const ObservabilitySample& s) { return s.energy_ratio <= result.gamma_emp; });
  return result;
}

}  // namespace kawahara::diagnostics
