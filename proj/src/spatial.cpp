#include "kawahara/spatial.hpp"

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <string>

#include "kawahara/error.hpp"

namespace kawahara::spatial {

namespace {

double falling_factorial(int p, int m) {
  double out = 1.0;
  for (int k = 0; k < m; ++k) out *= static_cast<double>(p - k);
  return out;
}

double power(double x, int n) {
  double out = 1.0;
  for (int k = 0; k < n; ++k) out *= x;
  return out;
}

// u_0 = u_N = 0 padding around the interior values.
Vector pad(const VectorRef& u) {
  Vector w = Vector::Zero(u.size() + 2);
  w.segment(1, u.size()) = u;
  return w;
}

Vector centered_d1(const VectorRef& padded, double dx) {
  const Eigen::Index n = padded.size() - 2;
  Vector out(n);
  for (Eigen::Index j = 0; j < n; ++j) out[j] = (padded[j + 2] - padded[j]) / (2.0 * dx);
  return out;
}

}  // namespace

Grid build_grid(double L, int N) {
  if (!(L > 0.0)) throw Error(ErrorKind::precondition, "grid length must be positive");
  if (N < kMinCells)
    throw Error(ErrorKind::precondition,
                "grid needs at least " + std::to_string(kMinCells) + " cells, got " +
                    std::to_string(N));
  return Grid{L, N, L / N};
}

Vector sample_interior(const Grid& grid, const std::function<double(double)>& f) {
  Vector u(grid.interior_size());
  for (int j = 1; j < grid.N; ++j) u[j - 1] = f(grid.x(j));
  return u;
}

std::vector<double> birkhoff_weights(double x0, int deriv,
                                     std::span<const PointFunctional> data) {
  const int K = static_cast<int>(data.size());
  if (deriv < 0 || deriv >= K)
    throw Error(ErrorKind::precondition, "birkhoff_weights: derivative order exceeds data");
  Eigen::MatrixXd V = Eigen::MatrixXd::Zero(K, K);
  for (int p = 0; p < K; ++p) {
    for (int i = 0; i < K; ++i) {
      const int m = data[i].order;
      if (p >= m) V(p, i) = falling_factorial(p, m) * power(data[i].x - x0, p - m);
    }
  }
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(K);
  rhs[deriv] = falling_factorial(deriv, deriv);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(V);
  if (!lu.isInvertible())
    throw Error(ErrorKind::solver, "birkhoff_weights: data set is not unisolvent");
  const Eigen::VectorXd w = lu.solve(rhs);
  return {w.data(), w.data() + K};
}

const char* to_string(NonlinearForm form) {
  switch (form) {
    case NonlinearForm::advective: return "advective";
    case NonlinearForm::conservative: return "conservative";
    case NonlinearForm::skew_symmetric: return "skew_symmetric";
  }
  return "advective";
}

NonlinearForm nonlinear_form_from_string(const std::string& name) {
  if (name == "advective") return NonlinearForm::advective;
  if (name == "conservative") return NonlinearForm::conservative;
  if (name == "skew_symmetric") return NonlinearForm::skew_symmetric;
  throw Error(ErrorKind::config, "unknown nonlinear form '" + name + "'");
}

Vector OperatorBundle::apply(const VectorRef& u, double phi) const {
  Vector out = A_lin * u;
  out += g_gen * phi;
  return out;
}

OperatorBundle build_linear_operator(const model::SystemParams& params, const Grid& grid,
                                     NonlinearForm nonlinear) {
  const int N = grid.N;
  const int n = grid.interior_size();
  const double dx = grid.dx;

  OperatorBundle ops;
  ops.grid = grid;
  ops.meta.nonlinear = nonlinear;
  ops.g_gen = Vector::Zero(n);

  struct Term {
    int deriv;
    int half_width;
    double coefficient;
  };
  const std::array<Term, 3> terms{{{1, 1, -params.a}, {3, 2, -params.b}, {5, 3, 1.0}}};

  // Index-unit data for the near-boundary fits. Left: u(0) = 0, u'(0) = 0 and
  // nodes 1..5. Right: u(L) = 0, u'(L) = 0, u''(L) = phi and nodes N-1..N-4.
  const int fit = ops.meta.boundary_fit_size;
  std::vector<int> left_nodes, right_nodes;
  for (int k = 1; k <= fit - 2; ++k) left_nodes.push_back(k);
  for (int k = 1; k <= fit - 3; ++k) right_nodes.push_back(N - k);

  std::vector<Eigen::Triplet<double>> triplets;
  auto add = [&](int row, int node, double value) {
    if (node >= 1 && node <= N - 1) triplets.emplace_back(row - 1, node - 1, value);
  };

  for (int j = 1; j <= N - 1; ++j) {
    for (const Term& term : terms) {
      const double scale = term.coefficient / power(dx, term.deriv);
      if (j - term.half_width >= 0 && j + term.half_width <= N) {
        std::vector<PointFunctional> data;
        for (int o = -term.half_width; o <= term.half_width; ++o)
          data.push_back({static_cast<double>(o), 0});
        const auto w = birkhoff_weights(0.0, term.deriv, data);
        for (int o = -term.half_width; o <= term.half_width; ++o)
          add(j, j + o, scale * w[o + term.half_width]);
      } else if (j - term.half_width < 0) {
        std::vector<PointFunctional> data{{static_cast<double>(-j), 0},
                                          {static_cast<double>(-j), 1}};
        for (int k : left_nodes) data.push_back({static_cast<double>(k - j), 0});
        const auto w = birkhoff_weights(0.0, term.deriv, data);
        for (std::size_t i = 0; i < left_nodes.size(); ++i) add(j, left_nodes[i], scale * w[i + 2]);
      } else {
        const double edge = static_cast<double>(N - j);
        std::vector<PointFunctional> data{{edge, 0}, {edge, 1}, {edge, 2}};
        for (int k : right_nodes) data.push_back({static_cast<double>(k - j), 0});
        const auto w = birkhoff_weights(0.0, term.deriv, data);
        for (std::size_t i = 0; i < right_nodes.size(); ++i)
          add(j, right_nodes[i], scale * w[i + 3]);
        // Index-unit second derivative is dx^2 u''(L).
        ops.g_gen[j - 1] += scale * w[2] * dx * dx;
      }
    }
  }

  ops.A_lin.resize(n, n);
  ops.A_lin.setFromTriplets(triplets.begin(), triplets.end());
  ops.A_lin.makeCompressed();
  return ops;
}

Vector trace_left_weights(const Grid& grid) {
  Vector c = Vector::Zero(grid.interior_size());
  const double inv = 1.0 / (grid.dx * grid.dx);
  c[0] = -5.0 * inv;
  c[1] = 4.0 * inv;
  c[2] = -1.0 * inv;
  return c;
}

double second_trace_left(const VectorRef& u, const Grid& grid) {
  return (-5.0 * u[0] + 4.0 * u[1] - u[2]) / (grid.dx * grid.dx);
}

double second_trace_right(const VectorRef& u, const Grid& grid) {
  const Eigen::Index n = u.size();
  return (-5.0 * u[n - 1] + 4.0 * u[n - 2] - u[n - 3]) / (grid.dx * grid.dx);
}

Vector nonlinear_term(const VectorRef& u, int p, const Grid& grid, NonlinearForm form) {
  if (p != 1 && p != 2) throw Error(ErrorKind::precondition, "nonlinearity exponent must be 1 or 2");
  const Vector up = (p == 1) ? Vector(u) : Vector(u.array().square());
  const Vector du = centered_d1(pad(u), grid.dx);
  switch (form) {
    case NonlinearForm::advective:
      return -(up.array() * du.array()).matrix();
    case NonlinearForm::conservative: {
      const Vector flux = (up.array() * u.array()).matrix();
      return -centered_d1(pad(flux), grid.dx) / static_cast<double>(p + 1);
    }
    case NonlinearForm::skew_symmetric: {
      const Vector flux = (up.array() * u.array()).matrix();
      const Vector dflux = centered_d1(pad(flux), grid.dx);
      return -(dflux + (up.array() * du.array()).matrix()) / static_cast<double>(p + 2);
    }
  }
  return Vector::Zero(u.size());
}

double quadrature(const VectorRef& values, const Grid& grid, Weight weight, double left,
                  double right) {
  double sum = 0.0;
  for (int j = 1; j < grid.N; ++j) {
    const double w = (weight == Weight::x) ? grid.x(j) : 1.0;
    sum += w * values[j - 1];
  }
  const double right_w = (weight == Weight::x) ? grid.L : 1.0;
  // x = 0 kills the left end under the Morawetz weight.
  const double left_w = (weight == Weight::x) ? 0.0 : 1.0;
  sum += 0.5 * (left_w * left + right_w * right);
  return sum * grid.dx;
}

double l2_norm_sq(const VectorRef& u, const Grid& grid, Weight weight) {
  return quadrature(u.array().square().matrix(), grid, weight);
}

}  // namespace kawahara::spatial
