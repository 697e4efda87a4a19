#include "kawahara/timeloop.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kawahara/error.hpp"
#include "kawahara/functionals.hpp"

namespace kawahara::timeloop {

const char* to_string(Mode mode) { return mode == Mode::linear ? "linear" : "nonlinear"; }

Mode mode_from_string(const std::string& name) {
  if (name == "linear") return Mode::linear;
  if (name == "nonlinear") return Mode::nonlinear;
  throw Error(ErrorKind::config, "unknown mode '" + name + "' (expected linear|nonlinear)");
}

const char* to_string(Coupling coupling) {
  return coupling == Coupling::implicit ? "implicit" : "lagged";
}

Coupling coupling_from_string(const std::string& name) {
  if (name == "implicit") return Coupling::implicit;
  if (name == "lagged") return Coupling::lagged;
  throw Error(ErrorKind::config, "unknown coupling '" + name + "' (expected implicit|lagged)");
}

const char* to_string(Scheme scheme) {
  return scheme == Scheme::crank_nicolson ? "crank_nicolson" : "bdf2";
}

Scheme scheme_from_string(const std::string& name) {
  if (name == "crank_nicolson" || name == "cn") return Scheme::crank_nicolson;
  if (name == "bdf2") return Scheme::bdf2;
  throw Error(ErrorKind::config, "unknown scheme '" + name + "' (expected crank_nicolson|bdf2)");
}

namespace {

Profile piecewise_linear(std::vector<double> samples, double left, double right) {
  if (samples.size() < 2) throw Error(ErrorKind::precondition, "need at least two samples");
  return [samples = std::move(samples), left, right](double x) {
    const double pos =
        (x - left) / (right - left) * static_cast<double>(samples.size() - 1);
    const double clamped = std::clamp(pos, 0.0, static_cast<double>(samples.size() - 1));
    const auto lo = std::min(static_cast<std::size_t>(clamped), samples.size() - 2);
    const double frac = clamped - static_cast<double>(lo);
    return (1.0 - frac) * samples[lo] + frac * samples[lo + 1];
  };
}

}  // namespace

InitialData InitialData::from_samples(std::vector<double> u_samples, double L,
                                      std::vector<double> z_samples, double h) {
  return {piecewise_linear(std::move(u_samples), 0.0, L),
          piecewise_linear(std::move(z_samples), -h, 0.0)};
}

CompatibilityReport check_compatibility(const InitialData& ic, double L, double tol) {
  CompatibilityReport report;
  const double e = 1e-6 * std::max(1.0, L);
  report.u_left = ic.u0(0.0);
  report.u_right = ic.u0(L);
  report.du_left = (ic.u0(e) - ic.u0(0.0)) / e;
  report.du_right = (ic.u0(L) - ic.u0(L - e)) / e;
  // One-sided differences carry an O(e) error from u'' at the ends.
  const double dtol = tol + 1e-5;
  report.ok = std::abs(report.u_left) <= tol && std::abs(report.u_right) <= tol &&
              std::abs(report.du_left) <= dtol && std::abs(report.du_right) <= dtol;
  return report;
}

SimState initial_state(const InitialData& ic, const spatial::Grid& grid,
                       const model::SystemParams& params, double dt) {
  if (!ic.u0 || !ic.z0) throw Error(ErrorKind::precondition, "initial data needs u0 and z0");
  SimState state{.u = spatial::sample_interior(grid, ic.u0),
                 .line = init_delay_line(ic.z0, params.h, dt),
                 .t = 0.0,
                 .steps = 0,
                 .u_prev = Vector(),
                 .nonlinear_prev = Vector(),
                 .phi = 0.0,
                 .startup = false};
  state.phi = params.alpha * spatial::second_trace_left(state.u, grid) +
              params.beta * state.line.sample(1.0);
  return state;
}

namespace {

Eigen::SparseMatrix<double> step_matrix(const spatial::OperatorBundle& ops,
                                        const Vector& trace_weights, double alpha, double coef) {
  const Eigen::Index n = ops.A_lin.rows();
  std::vector<Eigen::Triplet<double>> triplets;
  for (Eigen::Index i = 0; i < n; ++i) triplets.emplace_back(i, i, 1.0);
  for (Eigen::Index i = 0; i < ops.A_lin.outerSize(); ++i)
    for (decltype(ops.A_lin)::InnerIterator it(ops.A_lin, i); it; ++it)
      triplets.emplace_back(it.row(), it.col(), -coef * it.value());
  if (alpha != 0.0) {
    for (Eigen::Index i = 0; i < n; ++i) {
      if (ops.g_gen[i] == 0.0) continue;
      for (Eigen::Index j = 0; j < n; ++j)
        if (trace_weights[j] != 0.0)
          triplets.emplace_back(i, j, -coef * alpha * ops.g_gen[i] * trace_weights[j]);
    }
  }
  Eigen::SparseMatrix<double> B(n, n);
  B.setFromTriplets(triplets.begin(), triplets.end());
  B.makeCompressed();
  return B;
}

void factorize(Eigen::SparseLU<Eigen::SparseMatrix<double>>& solver,
               const Eigen::SparseMatrix<double>& B) {
  solver.analyzePattern(B);
  solver.factorize(B);
  if (solver.info() != Eigen::Success)
    throw Error(ErrorKind::solver,
                "step matrix factorization failed: " + solver.lastErrorMessage());
}

Vector checked_solve(const Eigen::SparseLU<Eigen::SparseMatrix<double>>& solver,
                     const Vector& rhs) {
  Vector out = solver.solve(rhs);
  if (solver.info() != Eigen::Success) throw Error(ErrorKind::solver, "linear solve failed");
  return out;
}

}  // namespace

Integrator::Integrator(const model::SystemParams& params, const spatial::OperatorBundle& ops,
                       double dt, StepOptions options)
    : params_(params),
      ops_(ops),
      dt_(dt),
      options_(std::move(options)),
      trace_weights_(spatial::trace_left_weights(ops.grid)),
      alpha_implicit_(options_.coupling == Coupling::implicit ? params.alpha : 0.0) {
  if (!(dt > 0.0)) throw Error(ErrorKind::precondition, "time step must be positive");
  if (dt > params.h * (1.0 + 1e-9))
    throw Error(ErrorKind::precondition, "time step must satisfy dt <= h");
  if (options_.mode == Mode::nonlinear && params.p != 1 && params.p != 2)
    throw Error(ErrorKind::precondition, "nonlinearity exponent must be 1 or 2");
  if (options_.startup_steps < 0)
    throw Error(ErrorKind::precondition, "startup_steps must be nonnegative");

  factorize(solver_half_, step_matrix(ops, trace_weights_, alpha_implicit_, 0.5 * dt));
  if (options_.scheme == Scheme::bdf2)
    factorize(solver_bdf_, step_matrix(ops, trace_weights_, alpha_implicit_, 2.0 * dt / 3.0));
}

Vector Integrator::source_vector(double t) const {
  const auto& grid = ops_.grid;
  Vector out(grid.interior_size());
  for (int j = 1; j < grid.N; ++j) out[j - 1] = options_.source(t, grid.x(j));
  return out;
}

Vector Integrator::explicit_terms(const Vector& u, double t) const {
  Vector out = Vector::Zero(u.size());
  if (options_.mode == Mode::nonlinear)
    out += spatial::nonlinear_term(u, params_.p, ops_.grid, ops_.meta.nonlinear);
  if (options_.source) out += source_vector(t);
  return out;
}

void Integrator::half_step(Vector& v, const SimState& state, double lag_steps) const {
  const double half = 0.5 * dt_;
  const double t_end = state.t + (params_.h / dt_ - lag_steps) * dt_;
  double boundary = params_.beta * state.line.value_at_lag(lag_steps);
  if (options_.coupling == Coupling::lagged) boundary += params_.alpha * trace_weights_.dot(v);
  v = checked_solve(solver_half_, v + half * (ops_.g_gen * boundary + explicit_terms(v, t_end)));
}

void Integrator::advance(SimState& state) const {
  const double delay_lag = params_.h / dt_;
  const double z_now = state.line.value_at_lag(delay_lag);
  const double z_next = state.line.value_at_lag(delay_lag - 1.0);
  const double trace_now = spatial::second_trace_left(state.u, ops_.grid);
  const bool lagged = options_.coupling == Coupling::lagged;
  const bool have_prev = state.u_prev.size() == state.u.size();

  Vector nonlinear_now;
  if (options_.mode == Mode::nonlinear)
    nonlinear_now = spatial::nonlinear_term(state.u, params_.p, ops_.grid, ops_.meta.nonlinear);
  const bool have_nonlinear_prev =
      options_.mode == Mode::nonlinear && state.nonlinear_prev.size() == nonlinear_now.size();

  Vector u_new;
  double trace_lagged = trace_now;
  const bool use_startup = state.steps < options_.startup_steps ||
                           (options_.scheme == Scheme::bdf2 && !have_prev);
  if (use_startup) {
    u_new = state.u;
    half_step(u_new, state, delay_lag - 0.5);
    half_step(u_new, state, delay_lag - 1.0);
    state.startup = true;
  } else if (options_.scheme == Scheme::bdf2) {
    const double c = 2.0 * dt_ / 3.0;
    double boundary = params_.beta * z_next;
    if (lagged) {
      trace_lagged = 2.0 * trace_now - trace_weights_.dot(state.u_prev);
      boundary += params_.alpha * trace_lagged;
    }
    Vector rhs = (4.0 * state.u - state.u_prev) / 3.0 + c * ops_.g_gen * boundary;
    if (options_.mode == Mode::nonlinear)
      rhs += c * (have_nonlinear_prev ? Vector(2.0 * nonlinear_now - state.nonlinear_prev)
                                      : nonlinear_now);
    if (options_.source) rhs += c * source_vector(state.t + dt_);
    u_new = checked_solve(solver_bdf_, rhs);
    state.startup = false;
  } else {
    const double phi_now =
        lagged ? state.phi : params_.alpha * trace_now + params_.beta * z_now;
    double boundary_next = params_.beta * z_next;
    if (lagged) boundary_next += params_.alpha * trace_now;
    Vector rhs = state.u + 0.5 * dt_ * (ops_.A_lin * state.u) +
                 0.5 * dt_ * ops_.g_gen * (phi_now + boundary_next);
    if (options_.mode == Mode::nonlinear)
      rhs += dt_ * (have_nonlinear_prev ? Vector(1.5 * nonlinear_now - 0.5 * state.nonlinear_prev)
                                        : nonlinear_now);
    if (options_.source)
      rhs += 0.5 * dt_ * (source_vector(state.t) + source_vector(state.t + dt_));
    u_new = checked_solve(solver_half_, rhs);
    state.startup = false;
  }

  const double trace_new = spatial::second_trace_left(u_new, ops_.grid);
  if (!std::isfinite(trace_new))
    throw Error(ErrorKind::solver, "non-finite state after step at t=" + std::to_string(state.t));
  state.phi = params_.beta * z_next + params_.alpha * (lagged ? trace_lagged : trace_new);
  state.nonlinear_prev = std::move(nonlinear_now);
  state.u_prev = std::move(state.u);
  state.u = std::move(u_new);
  state.line.push(trace_new);
  ++state.steps;
  state.t = state.line.t_current();
}

SimState Integrator::step(const SimState& state) const {
  SimState next = state;
  advance(next);
  return next;
}

SimState step(const SimState& state, const model::SystemParams& params,
              const spatial::OperatorBundle& ops, double dt, StepOptions options) {
  return Integrator(params, ops, dt, std::move(options)).step(state);
}

namespace {

EnergyRecord make_record(const SimState& state, const spatial::Grid& grid,
                         const model::SystemParams& params, const RunRecord& run) {
  EnergyRecord rec;
  rec.t = state.t;
  rec.l2 = spatial::l2_norm_sq(state.u, grid);
  const auto integrals = diagnostics::delay_integrals(state.line);
  rec.zint = integrals.z2;
  rec.E = rec.l2 + params.h * std::abs(params.beta) * rec.zint;
  rec.V = run.has_lyapunov
              ? rec.E + run.mu1 * spatial::l2_norm_sq(state.u, grid, spatial::Weight::x) +
                    run.mu2 * params.h * integrals.weighted_z2
              : std::numeric_limits<double>::quiet_NaN();
  rec.trace0 = spatial::second_trace_left(state.u, grid);
  rec.z1 = state.line.sample(1.0);
  rec.phi = state.phi;
  rec.startup = state.startup;
  return rec;
}

}  // namespace

RunRecord simulate(const model::SystemParams& params, const InitialData& ic,
                   const SimulationOptions& options) {
  const auto report = model::validate_params(params);
  if (!report.ok())
    throw Error(ErrorKind::precondition,
                "invalid parameters: violated constraint " + report.violations.front());
  if (!(options.T >= 0.0)) throw Error(ErrorKind::precondition, "T must be nonnegative");
  if (options.record_stride < 1) throw Error(ErrorKind::precondition, "record_stride must be >= 1");

  RunRecord run;
  run.params = params;
  run.grid = spatial::build_grid(params.L, options.N);
  run.dt = options.dt;
  run.mode = options.mode;
  run.scheme = options.scheme;
  run.startup_steps = options.startup_steps;
  if (options.mu1 && options.mu2) {
    run.has_lyapunov = true;
    run.mu1 = *options.mu1;
    run.mu2 = *options.mu2;
  }

  const auto ops = spatial::build_linear_operator(params, run.grid, options.nonlinear);
  const Integrator integrator(params, ops, options.dt,
                              {options.mode, options.coupling, options.scheme,
                               options.startup_steps, options.source});
  SimState state = initial_state(ic, run.grid, params, options.dt);

  const auto compat = check_compatibility(ic, params.L);
  if (!compat.ok) run.warnings.emplace_back("initial data violates u0=u0'=0 at the endpoints");

  run.u0_norm_sq = spatial::l2_norm_sq(state.u, run.grid);
  run.z0_norm_sq = diagnostics::delay_integrals(state.line).z2;
  if (options.mode == Mode::nonlinear && report.length_ok) {
    const double norm_h =
        std::sqrt(run.u0_norm_sq + params.h * std::abs(params.beta) * run.z0_norm_sq);
    if (norm_h >= model::smallness_radius(params))
      run.warnings.emplace_back("initial data outside the smallness radius");
  }

  const long nsteps = static_cast<long>(std::ceil(options.T / options.dt - 1e-9));
  std::vector<std::pair<long, double>> snap_steps;
  for (double ts : options.snapshot_times) {
    if (ts < 0.0 || ts > options.T + 1e-12) {
      run.warnings.emplace_back("snapshot time outside [0,T] ignored");
      continue;
    }
    snap_steps.emplace_back(std::lround(ts / options.dt), ts);
  }
  auto take_snapshots = [&](long n) {
    for (const auto& [k, ts] : snap_steps)
      if (k == n) run.snapshots.push_back({state.t, state.u});
  };

  EnergyRecord last = make_record(state, run.grid, params, run);
  run.series.push_back(last);
  take_snapshots(0);
  for (long n = 1; n <= nsteps; ++n) {
    integrator.advance(state);
    const EnergyRecord rec = make_record(state, run.grid, params, run);
    if (rec.E > last.E * (1.0 + 1e-12) + 1e-300) ++run.monotonicity_violations;
    last = rec;
    if (n % options.record_stride == 0 || n == nsteps) run.series.push_back(rec);
    take_snapshots(n);
  }
  run.u_final = state.u;
  return run;
}

}  // namespace kawahara::timeloop
