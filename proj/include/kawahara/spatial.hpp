#pragma once

// Uniform grid on (0, L) and finite-difference realization of
//   A u = -a u_x - b u_xxx + u_xxxxx
// with u = u_x = 0 at both ends and u_xx(L) = phi entering as forcing.
//
// State vectors hold the interior node values u_1 .. u_{N-1}; u_0 = u_N = 0.

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <functional>
#include <span>
#include <vector>

#include "kawahara/model.hpp"

namespace kawahara::spatial {

using Vector = Eigen::VectorXd;
using VectorRef = Eigen::Ref<const Eigen::VectorXd>;

inline constexpr int kMinCells = 16;

struct Grid {
  double L = 1.0;
  int N = kMinCells;
  double dx = 1.0 / kMinCells;

  double x(int j) const { return j * dx; }
  int interior_size() const { return N - 1; }
};

Grid build_grid(double L, int N);

/// Samples f at the interior nodes x_1 .. x_{N-1}.
Vector sample_interior(const Grid& grid, const std::function<double(double)>& f);

/// A linear functional on smooth functions: f^(order)(x).
struct PointFunctional {
  double x = 0.0;
  int order = 0;
};

/// Weights w_i with sum_i w_i f^(order_i)(x_i) = f^(deriv)(x0) exactly for
/// every polynomial of degree < data.size() (Hermite-Birkhoff generalization
/// of Fornberg's finite-difference weights). Positions are taken as given;
/// callers pass offsets in units of dx for conditioning.
std::vector<double> birkhoff_weights(double x0, int deriv,
                                     std::span<const PointFunctional> data);

enum class NonlinearForm {
  advective,       // -u^p D1 u
  conservative,    // -D1(u^{p+1}) / (p+1)
  skew_symmetric,  // convex blend of the two with sum_j u_j N_j = 0
};

const char* to_string(NonlinearForm form);
NonlinearForm nonlinear_form_from_string(const std::string& name);

struct StencilMeta {
  int interior_order = 2;
  int d1_points = 3;
  int d3_points = 5;
  int d5_points = 7;
  /// Data functionals in each near-boundary fit: boundary value, boundary
  /// derivative constraints and the nearest interior nodes.
  int boundary_fit_size = 7;
  NonlinearForm nonlinear = NonlinearForm::advective;
};

struct OperatorBundle {
  Grid grid;
  Eigen::SparseMatrix<double, Eigen::RowMajor> A_lin;
  /// Forcing produced by a unit boundary datum phi = u_xx(L).
  Vector g_gen;
  StencilMeta meta;

  /// A_lin u + g_gen phi.
  Vector apply(const VectorRef& u, double phi = 0.0) const;
  Vector forcing(double phi) const { return g_gen * phi; }
};

OperatorBundle build_linear_operator(const model::SystemParams& params,
                                     const Grid& grid,
                                     NonlinearForm nonlinear = NonlinearForm::advective);

/// Weights c with c . u = second_trace_left(u, grid).
Vector trace_left_weights(const Grid& grid);

/// One-sided estimate of u_xx(0): (2 u_0 - 5 u_1 + 4 u_2 - u_3) / dx^2, u_0 = 0.
double second_trace_left(const VectorRef& u, const Grid& grid);
/// Mirror image of second_trace_left at x = L.
double second_trace_right(const VectorRef& u, const Grid& grid);

/// Discrete -u^p u_x at the interior nodes.
Vector nonlinear_term(const VectorRef& u, int p, const Grid& grid,
                      NonlinearForm form = NonlinearForm::advective);

enum class Weight { one, x };

/// Composite trapezoidal rule over nodes 0..N; interior values given, end
/// values default to the homogeneous boundary data.
double quadrature(const VectorRef& values, const Grid& grid, Weight weight = Weight::one,
                  double left = 0.0, double right = 0.0);

/// quadrature(u^2, weight).
double l2_norm_sq(const VectorRef& u, const Grid& grid, Weight weight = Weight::one);

}  // namespace kawahara::spatial
