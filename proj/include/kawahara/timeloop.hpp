#pragma once

// Time integration of the boundary-controlled system and the simulation driver.

#include <Eigen/SparseLU>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "kawahara/delay_line.hpp"
#include "kawahara/model.hpp"
#include "kawahara/spatial.hpp"

namespace kawahara::timeloop {

using spatial::Vector;

enum class Mode { linear, nonlinear };
enum class Coupling { implicit, lagged };
/// Treatment of the linear part. bdf2 is L-stable: it damps the stiff modes
/// that Crank-Nicolson merely reflects.
enum class Scheme { crank_nicolson, bdf2 };

const char* to_string(Mode mode);
Mode mode_from_string(const std::string& name);
const char* to_string(Coupling coupling);
Coupling coupling_from_string(const std::string& name);
const char* to_string(Scheme scheme);
Scheme scheme_from_string(const std::string& name);

using Profile = std::function<double(double)>;
/// Volume source f(t, x) added to the right-hand side.
using Source = std::function<double(double, double)>;

struct InitialData {
  Profile u0;  // on [0, L]
  Profile z0;  // on [-h, 0]

  /// Piecewise-linear profiles through equispaced samples covering [0, L]
  /// and [-h, 0] respectively (endpoints included).
  static InitialData from_samples(std::vector<double> u_samples, double L,
                                  std::vector<double> z_samples, double h);
};

struct CompatibilityReport {
  double u_left = 0.0, u_right = 0.0, du_left = 0.0, du_right = 0.0;
  bool ok = true;
};

/// Checks u0(0) = u0(L) = u0'(0) = u0'(L) = 0 (derivatives by central
/// differences of the profile).
CompatibilityReport check_compatibility(const InitialData& ic, double L, double tol = 1e-8);

struct SimState {
  Vector u;
  DelayLine line;
  double t = 0.0;
  long steps = 0;
  Vector u_prev;          // u^{n-1}; empty before the first step
  Vector nonlinear_prev;  // N(u^{n-1}); empty before the first step
  double phi = 0.0;       // boundary datum u_xx(t, L) currently imposed
  bool startup = false;   // last step used the implicit-Euler startup
};

SimState initial_state(const InitialData& ic, const spatial::Grid& grid,
                       const model::SystemParams& params, double dt);

struct StepOptions {
  Mode mode = Mode::nonlinear;
  Coupling coupling = Coupling::implicit;
  Scheme scheme = Scheme::crank_nicolson;
  /// Number of leading steps replaced by two implicit-Euler half steps each
  /// (at least one is taken with bdf2).
  int startup_steps = 2;
  Source source;
};

/// Implicit linear part (Crank-Nicolson or BDF2) with second-order explicit
/// extrapolation of the nonlinearity (Adams-Bashforth 2 or its BDF2
/// counterpart). Holds the factorized step matrices; reuse it for every step
/// of a run.
class Integrator {
 public:
  Integrator(const model::SystemParams& params, const spatial::OperatorBundle& ops, double dt,
             StepOptions options = {});

  void advance(SimState& state) const;
  SimState step(const SimState& state) const;

  double dt() const { return dt_; }
  const spatial::OperatorBundle& ops() const { return ops_; }
  const StepOptions& options() const { return options_; }

 private:
  Vector explicit_terms(const Vector& u, double t) const;
  void half_step(Vector& v, const SimState& state, double lag_steps) const;
  Vector source_vector(double t) const;

  model::SystemParams params_;
  spatial::OperatorBundle ops_;
  double dt_;
  StepOptions options_;
  Vector trace_weights_;
  double alpha_implicit_;
  // I - (dt/2) J serves Crank-Nicolson and the startup half steps;
  // I - (2 dt/3) J serves BDF2.
  Eigen::SparseLU<Eigen::SparseMatrix<double>> solver_half_;
  Eigen::SparseLU<Eigen::SparseMatrix<double>> solver_bdf_;
};

/// One step with a freshly factorized integrator (convenience; use
/// Integrator for loops).
SimState step(const SimState& state, const model::SystemParams& params,
              const spatial::OperatorBundle& ops, double dt, StepOptions options = {});

struct EnergyRecord {
  double t = 0.0;
  double E = 0.0;
  double V = 0.0;  // NaN when no Lyapunov weights were given
  double trace0 = 0.0;
  double z1 = 0.0;
  double l2 = 0.0;
  double zint = 0.0;
  double phi = 0.0;
  bool startup = false;
};

struct Snapshot {
  double t = 0.0;
  Vector u;  // interior values
};

struct SimulationOptions {
  double T = 1.0;
  int N = 128;
  double dt = 1e-3;
  Mode mode = Mode::nonlinear;
  Coupling coupling = Coupling::implicit;
  Scheme scheme = Scheme::crank_nicolson;
  spatial::NonlinearForm nonlinear = spatial::NonlinearForm::advective;
  int startup_steps = 2;
  std::optional<double> mu1, mu2;
  std::vector<double> snapshot_times;
  /// Record every k-th step (the final step is always recorded).
  int record_stride = 1;
  Source source;
};

struct RunRecord {
  model::SystemParams params;
  spatial::Grid grid;
  double dt = 0.0;
  Mode mode = Mode::nonlinear;
  Scheme scheme = Scheme::crank_nicolson;
  bool has_lyapunov = false;
  double mu1 = 0.0, mu2 = 0.0;
  int startup_steps = 0;
  double u0_norm_sq = 0.0;  // int u0^2 dx
  double z0_norm_sq = 0.0;  // int_0^1 z0(-h rho)^2 drho
  std::vector<EnergyRecord> series;
  std::vector<Snapshot> snapshots;
  Vector u_final;
  /// Steps where E increased by more than 1e-12 relative.
  int monotonicity_violations = 0;
  std::vector<std::string> warnings;
};

RunRecord simulate(const model::SystemParams& params, const InitialData& ic,
                   const SimulationOptions& options);

}  // namespace kawahara::timeloop
