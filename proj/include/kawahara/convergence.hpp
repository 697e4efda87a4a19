#pragma once

// Manufactured solutions u(t, x) = e^{-t} w(x) with polynomial w, the
// source that makes them exact, and refinement studies built on them.

#include <vector>

#include "kawahara/model.hpp"
#include "kawahara/timeloop.hpp"

namespace kawahara::verification {

struct Poly {
  std::vector<double> c;  // c[k] x^k

  double operator()(double x) const;
  Poly derivative(int times = 1) const;
};

Poly operator*(const Poly& p, const Poly& q);
Poly power(const Poly& p, int n);

struct Manufactured {
  model::SystemParams params;
  Poly w;
  bool nonlinear = true;

  double exact(double t, double x) const;
  /// f = u_t + a u_x + b u_xxx - u_xxxxx (+ u^p u_x when nonlinear).
  timeloop::Source source() const;
  /// u0 = w and the history z0(s) = w''(0) e^{-s} consistent with the solution.
  timeloop::InitialData initial_data() const;
};

/// e^{-t} x^3 (L - x)^3: both second-derivative traces vanish, so any
/// feedback gains are compatible.
Manufactured cubic_bump(const model::SystemParams& params);

/// e^{-t} x^2 (L - x)^2 (1 + k x) with k = (alpha + beta e^h - 1) / L, so that
/// u_xx(t, L) = alpha u_xx(t, 0) + beta u_xx(t - h, 0) holds exactly.
Manufactured feedback_bump(const model::SystemParams& params);

struct ConvergenceOptions {
  double T = 1.0;
  std::vector<int> space_N{64, 128, 256};
  double space_dt = 1e-4;
  std::vector<double> time_dt{4e-3, 2e-3, 1e-3};
  int time_N = 512;
  timeloop::Scheme scheme = timeloop::Scheme::crank_nicolson;
};

struct ConvergenceReport {
  /// Max-norm error against the exact solution at T for each space_N.
  std::vector<double> space_errors;
  std::vector<double> space_orders;  // log2 of successive error ratios
  /// Max-norm differences of successive time_dt solutions at T (Richardson:
  /// the spatial error cancels at fixed N).
  std::vector<double> time_differences;
  std::vector<double> time_orders;
};

/// Spatial refinement against the exact solution; temporal refinement by
/// successive differences. Runs execute in parallel. An empty list skips that
/// study; a single entry is an error.
ConvergenceReport convergence_study(const Manufactured& m, const ConvergenceOptions& options);

}  // namespace kawahara::verification
