#pragma once

// Post-processing of simulation runs: decay fits, the trace estimate with
// explicit constants, the linear dissipation identity and the observability
// probe.

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "kawahara/functionals.hpp"
#include "kawahara/timeloop.hpp"

namespace kawahara::diagnostics {

double energy(const timeloop::SimState& state, const spatial::Grid& grid,
              const model::SystemParams& params);
double lyapunov(const timeloop::SimState& state, const spatial::Grid& grid,
                const model::SystemParams& params, double mu1, double mu2);

struct DecayFit {
  double C = 0.0;
  double gamma = 0.0;
  double residual = 0.0;  // rms of the log-linear fit
  double t_a = 0.0, t_b = 0.0;
  std::size_t samples = 0;
};

/// Least squares of log E against t over samples with t in [t_a, t_b] and
/// E > 0. Needs at least 10 such samples.
DecayFit fit_exponential(std::span<const std::pair<double, double>> series, double t_a,
                         double t_b);
DecayFit fit_exponential(const std::vector<timeloop::EnergyRecord>& series, double t_a,
                         double t_b);

/// Sum of the two explicit trace-estimate constants:
/// (T+1)(1 + 1/(h|beta|)) / (1 - (alpha^2 + beta^2)) + (T+1)(1 + 1/(h|beta|)).
double trace_estimate_constant(const model::SystemParams& params, double T);

struct TraceEstimateReport {
  double lhs = 0.0;  // int_0^T trace0^2 + z1^2 dt
  double rhs = 0.0;  // C (|u0|^2 + |z0|^2)
  double constant = 0.0;
  double slack = 0.05;
  bool passed = false;
};

/// Requires a linear-mode run; integrates the recorded series up to T by the
/// trapezoidal rule.
TraceEstimateReport trace_estimate_check(const timeloop::RunRecord& run,
                                         const model::SystemParams& params, double T,
                                         double slack = 0.05);

struct DissipationReport {
  double max_mismatch = 0.0;
  /// Same comparison with the right side taken as the plain average of
  /// (M eta, eta) / 2 at both ends.
  double max_mismatch_endpoint = 0.0;
  double max_eta_sq = 0.0;  // max over the run of trace0^2 + z1^2
  double tolerance = 0.0;   // (dt + dx^2) max_eta_sq
  std::size_t intervals = 0;
  bool within_tolerance = true;
};

/// Compares (E^{n+1} - E^n) / (2 dt) with (M eta, eta) / 2, eta = (trace0,
/// z1), over each recorded step. (M eta, eta) is the boundary flux
/// phi^2 - trace0^2 plus the transport flux |beta| (trace0^2 - z1^2); the
/// first is evaluated at the step midpoint and the second averaged over the
/// endpoints, the quadratures under which Crank-Nicolson balances
/// energy. Startup steps are skipped. Needs record_stride = 1.
DissipationReport dissipation_check(const timeloop::RunRecord& run,
                                    const model::SystemParams& params);

struct ObservabilityOptions {
  int N = 300;
  double dt = 1e-3;
  timeloop::Scheme scheme = timeloop::Scheme::crank_nicolson;
};

struct ObservabilitySample {
  double ratio = 0.0;         // |(u0,z0)|_H^2 / int_0^T (trace0^2 + z1^2)
  double energy_ratio = 0.0;  // E(T) / E(0)
  bool suspected_failure = false;
};

struct ObservabilityResult {
  double C_emp = 0.0;
  double gamma_emp = 0.0;
  double nu_emp = 0.0;
  std::vector<ObservabilitySample> samples;
  std::size_t suspected_failures = 0;
  bool decay_consistent = false;  // E(T) <= gamma_emp E(0) for every sample
};

/// Random smooth initial state number `index` of the probe, normalized to
/// unit H-norm on the given grid.
timeloop::InitialData observability_sample(const model::SystemParams& params,
                                           const spatial::Grid& grid, double dt,
                                           std::uint64_t seed, std::size_t index);

ObservabilityResult observability_estimate(const model::SystemParams& params, double T,
                                           int n_samples, std::uint64_t seed,
                                           const ObservabilityOptions& options = {});

}  // namespace kawahara::diagnostics
