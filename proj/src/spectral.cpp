#include "kawahara/spectral.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "kawahara/error.hpp"
#include "kawahara/parallel.hpp"

namespace kawahara::spectral {

namespace {

constexpr cplx I{0.0, 1.0};

double scale_of(cplx z) { return std::max(1.0, std::abs(z)); }

cplx polish(cplx xi, double r) {
  for (int it = 0; it < 60; ++it) {
    const cplx d = q_derivative(xi);
    if (std::abs(d) < 1e-14) break;
    const cplx step = q_value(xi, r) / d;
    xi -= step;
    if (std::abs(step) <= 1e-16 * scale_of(xi)) break;
  }
  return xi;
}

}  // namespace

cplx q_value(cplx xi, double r) {
  const cplx x2 = xi * xi;
  return ((x2 + 1.0) * x2 - 1.0) * xi + r;
}

cplx q_derivative(cplx xi) {
  const cplx x2 = xi * xi;
  return (5.0 * x2 + 3.0) * x2 - 1.0;
}

const char* to_string(RootClass c) {
  switch (c) {
    case RootClass::one_real_two_conjugate_pairs: return "one_real_two_conjugate_pairs";
    case RootClass::degenerate_r_zero: return "degenerate_r_zero";
    case RootClass::other: return "other";
  }
  return "other";
}

bool RootSet::distinct() const {
  return std::all_of(multiplicity.begin(), multiplicity.end(), [](int m) { return m == 1; });
}

RootSet q_roots(double r) {
  if (!std::isfinite(r)) throw Error(ErrorKind::domain, "q_roots requires finite r");
  // Monic xi^5 + 0 xi^4 + xi^3 + 0 xi^2 - xi + r.
  const std::array<double, 5> coeff{r, -1.0, 0.0, 1.0, 0.0};
  Eigen::Matrix<double, 5, 5> companion = Eigen::Matrix<double, 5, 5>::Zero();
  for (int i = 1; i < 5; ++i) companion(i, i - 1) = 1.0;
  for (int i = 0; i < 5; ++i) companion(i, 4) = -coeff[i];
  const Eigen::EigenSolver<Eigen::Matrix<double, 5, 5>> eig(companion, false);
  if (eig.info() != Eigen::Success)
    throw Error(ErrorKind::solver, "companion eigenvalue computation failed");

  std::vector<cplx> reals, upper;
  for (int i = 0; i < 5; ++i) {
    cplx xi = polish(eig.eigenvalues()[i], r);
    if (std::abs(xi.imag()) <= 1e-10 * scale_of(xi)) {
      reals.push_back(polish(cplx(xi.real(), 0.0), r));
      reals.back().imag(0.0);
    } else if (xi.imag() > 0.0) {
      upper.push_back(xi);
    }
  }
  // Real coefficients: non-real roots pair with their conjugates. Use the
  // upper half plane representatives and mirror them.
  if (reals.size() + 2 * upper.size() != 5)
    throw Error(ErrorKind::solver, "root set of q is not conjugation symmetric");
  std::sort(upper.begin(), upper.end(), [](cplx x, cplx y) {
    return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
  });
  std::sort(reals.begin(), reals.end(), [](cplx x, cplx y) { return x.real() < y.real(); });

  RootSet set;
  set.r = r;
  std::size_t k = 0;
  for (cplx z : upper) set.roots[k++] = z;
  for (cplx z : upper) set.roots[k++] = std::conj(z);
  for (cplx z : reals) set.roots[k++] = z;
  for (std::size_t i = 0; i < 5; ++i) {
    set.multiplicity[i] = 0;
    for (std::size_t j = 0; j < 5; ++j)
      if (std::abs(set.roots[i] - set.roots[j]) < kRepeatTolerance * scale_of(set.roots[i]))
        ++set.multiplicity[i];
  }
  set.real_count = static_cast<int>(reals.size());
  if (r == 0.0)
    set.classification = RootClass::degenerate_r_zero;
  else if (set.real_count == 1 && upper.size() == 2 && set.distinct())
    set.classification = RootClass::one_real_two_conjugate_pairs;
  else
    set.classification = RootClass::other;
  return set;
}

CriticalPoints qprime_critical_points() {
  const double s29 = std::sqrt(29.0);
  return {std::sqrt(cplx((-3.0 - s29) / 10.0, 0.0)), std::sqrt((-3.0 + s29) / 10.0)};
}

double three_real_roots_threshold() {
  const double z = qprime_critical_points().z2;
  return std::abs(((z * z + 1.0) * z * z - 1.0) * z);
}

cplx cross_ratio(const std::array<cplx, 4>& z) {
  return (z[0] - z[2]) * (z[1] - z[3]) / ((z[1] - z[2]) * (z[0] - z[3]));
}

double cross_ratio_mismatch(const std::array<cplx, 4>& xi, double L) {
  std::array<cplx, 4> w;
  for (std::size_t k = 0; k < 4; ++k) w[k] = std::exp(-I * L * xi[k]);
  const cplx cz = cross_ratio(xi), cw = cross_ratio(w);
  return std::abs(cz - cw) / std::max({1.0, std::abs(cz), std::abs(cw)});
}

Mobius Mobius::through(const std::array<cplx, 3>& z, const std::array<cplx, 3>& w) {
  // T_p sends p0 -> 0, p1 -> 1, p2 -> inf.
  auto normal_form = [](const std::array<cplx, 3>& p) {
    return std::array<cplx, 4>{p[1] - p[2], -p[0] * (p[1] - p[2]), p[1] - p[0],
                               -p[2] * (p[1] - p[0])};
  };
  auto normalized = [](std::array<cplx, 4> m) {
    double s = 0.0;
    for (cplx v : m) s = std::max(s, std::abs(v));
    if (s > 0.0)
      for (cplx& v : m) v /= s;
    return m;
  };
  const auto tz = normalized(normal_form(z));
  const auto tw = normalized(normal_form(w));
  // inverse of [a b; c d] up to scale is [d -b; -c a]
  const std::array<cplx, 4> inv{tw[3], -tw[1], -tw[2], tw[0]};
  const auto m = normalized({inv[0] * tz[0] + inv[1] * tz[2], inv[0] * tz[1] + inv[1] * tz[3],
                             inv[2] * tz[0] + inv[3] * tz[2], inv[2] * tz[1] + inv[3] * tz[3]});
  return {m[0], m[1], m[2], m[3]};
}

double mobius_residual(const RootSet& roots, double L, std::array<int, 3> anchors) {
  if (!roots.distinct())
    throw Error(ErrorKind::domain, "Mobius consistency needs pairwise distinct roots");
  std::array<cplx, 3> z, w;
  std::array<bool, 5> used{};
  for (std::size_t k = 0; k < 3; ++k) {
    const int idx = anchors[k];
    if (idx < 0 || idx > 4 || used[idx])
      throw Error(ErrorKind::precondition, "anchors must be three distinct root indices");
    used[idx] = true;
    z[k] = roots.roots[idx];
    w[k] = std::exp(-I * L * z[k]);
  }
  const Mobius map = Mobius::through(z, w);
  double worst = 0.0;
  for (std::size_t i = 0; i < 5; ++i) {
    if (used[i]) continue;
    const cplx target = std::exp(-I * L * roots.roots[i]);
    const cplx value = map(roots.roots[i]);
    const double dev = std::isfinite(std::abs(value)) ? std::abs(value - target) / std::abs(target)
                                                      : std::numeric_limits<double>::infinity();
    worst = std::max(worst, dev);
  }
  return worst;
}

double mobius_consistency(const RootSet& roots, double L) {
  return mobius_residual(roots, L, {0, 1, 2});
}

namespace {

// Groups equal roots so that the k-th copy of a repeated root contributes
// its k-th xi-derivative.
std::array<int, 5> derivative_orders(const RootSet& roots) {
  std::array<int, 5> order{};
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (std::abs(roots.roots[i] - roots.roots[j]) < kRepeatTolerance * scale_of(roots.roots[i]))
        ++order[i];
  return order;
}

// Entries of the alpha-test row: f(xi) = [i xi, -i xi E, 1, -E], E = e^{-i xi L},
// and its derivatives in xi up to order 2.
std::array<cplx, 4> alpha_row(cplx xi, double L, int deriv) {
  const cplx E = std::exp(-I * xi * L);
  const cplx k = -I * L;  // dE/dxi = k E
  switch (deriv) {
    case 0: return {I * xi, -I * xi * E, 1.0, -E};
    case 1: return {I, -I * E * (1.0 + k * xi), 0.0, -k * E};
    default: return {0.0, -I * E * (2.0 * k + k * k * xi), 0.0, -k * k * E};
  }
}

// Boundary functionals of e^{i xi x} (and xi-derivatives) at 0 and L.
std::array<cplx, 6> bvp_column(cplx xi, double L, int deriv) {
  // v(x) = d^m/dxi^m e^{i xi x} = (i x)^m e^{i xi x}; v' and v'' follow by
  // differentiating in x.
  std::array<cplx, 6> col{};
  const std::array<double, 2> xs{0.0, L};
  for (std::size_t side = 0; side < 2; ++side) {
    const double x = xs[side];
    const cplx e = std::exp(I * xi * x);
    const cplx ix = I * x, ik = I * xi;
    cplx v, v1, v2;
    switch (deriv) {
      case 0:
        v = e;
        v1 = ik * e;
        v2 = ik * ik * e;
        break;
      case 1:
        v = ix * e;
        v1 = I * e + ix * ik * e;
        v2 = 2.0 * I * ik * e + ix * ik * ik * e;
        break;
      default:
        v = ix * ix * e;
        v1 = 2.0 * I * ix * e + ix * ix * ik * e;
        v2 = 2.0 * I * I * e + 4.0 * I * ix * ik * e + ix * ix * ik * ik * e;
        break;
    }
    col[3 * side] = v;
    col[3 * side + 1] = v1;
    col[3 * side + 2] = v2;
  }
  return col;
}

}  // namespace

AlphaTest alpha_rank_test(const RootSet& roots, double L) {
  const auto orders = derivative_orders(roots);
  Eigen::Matrix<cplx, 5, 4> m;
  for (int i = 0; i < 5; ++i) {
    const auto row = alpha_row(roots.roots[i], L, orders[i]);
    double norm = 0.0;
    for (cplx v : row) norm += std::norm(v);
    norm = std::sqrt(norm);
    for (int j = 0; j < 4; ++j) m(i, j) = row[j] / norm;
  }
  const Eigen::JacobiSVD<Eigen::Matrix<cplx, 5, 4>> svd(m, Eigen::ComputeFullV);
  AlphaTest out;
  out.sigma_min = svd.singularValues()[3];
  for (int j = 0; j < 4; ++j) out.null_alpha[j] = svd.matrixV()(j, 3);
  out.d_alpha = out.null_alpha[0] * out.null_alpha[2] - out.null_alpha[1] * out.null_alpha[3];
  return out;
}

BoundaryMatrix boundary_matrix(const RootSet& roots, double L,
                               const std::array<double, 5>& column_scale) {
  const auto orders = derivative_orders(roots);
  BoundaryMatrix m;
  for (int j = 0; j < 5; ++j) {
    const auto col = bvp_column(roots.roots[j], L, orders[j]);
    double norm = 0.0;
    for (cplx v : col) norm += std::norm(v);
    norm = std::sqrt(norm);
    for (int i = 0; i < 6; ++i) m(i, j) = column_scale[j] * col[i] / norm;
  }
  return m;
}

std::vector<double> singular_values(const BoundaryMatrix& m) {
  const Eigen::JacobiSVD<BoundaryMatrix> svd(m);
  const auto& s = svd.singularValues();
  return {s.data(), s.data() + s.size()};
}

std::vector<double> bvp_singular_values(const RootSet& roots, double L,
                                        const std::array<double, 5>& column_scale) {
  return singular_values(boundary_matrix(roots, L, column_scale));
}

double bvp_matrix_test(const RootSet& roots, double L) {
  return bvp_singular_values(roots, L).back();
}

ScanResult spectral_scan(double r_lo, double r_hi, double L_lo, double L_hi, int nr, int nL) {
  if (!std::isfinite(r_lo) || !std::isfinite(r_hi) || !std::isfinite(L_lo) ||
      !std::isfinite(L_hi))
    throw Error(ErrorKind::precondition, "scan ranges must be finite");
  if (nr < 0 || nL < 0) throw Error(ErrorKind::precondition, "scan sizes must be nonnegative");
  if (static_cast<double>(nr) * static_cast<double>(nL) > 1e7)
    throw Error(ErrorKind::precondition, "scan grid exceeds 1e7 cells");

  ScanResult result;
  result.nr = nr;
  result.nL = nL;
  if (nr == 0 || nL == 0 || r_hi < r_lo || L_hi < L_lo) {
    result.nr = result.nL = 0;
    return result;
  }
  auto node = [](double lo, double hi, int n, int i) {
    return n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  };
  const double threshold = three_real_roots_threshold();
  result.cells.resize(static_cast<std::size_t>(nr) * static_cast<std::size_t>(nL));
  parallel_for(static_cast<std::size_t>(nr), [&](std::size_t i) {
    const double r = node(r_lo, r_hi, nr, static_cast<int>(i));
    const RootSet roots = q_roots(r);
    std::uint32_t flags = 0;
    if (!roots.distinct()) flags |= kRepeatedRoots;
    if (r == 0.0) flags |= kRZero;
    if (r != 0.0 && std::abs(r) < threshold) flags |= kThreeRealRoots;
    for (int j = 0; j < nL; ++j) {
      ScanCell& cell = result.cells[i * static_cast<std::size_t>(nL) + static_cast<std::size_t>(j)];
      cell.r = r;
      cell.L = node(L_lo, L_hi, nL, j);
      cell.flags = flags;
      const double nan = std::numeric_limits<double>::quiet_NaN();
      cell.mobius = (flags & kRepeatedRoots) ? nan : mobius_consistency(roots, cell.L);
      cell.sigma_min = alpha_rank_test(roots, cell.L).sigma_min;
      cell.sigma5 = bvp_matrix_test(roots, cell.L);
    }
  });

  const double inf = std::numeric_limits<double>::infinity();
  result.min_mobius = result.min_sigma_min = result.min_sigma5 = inf;
  for (const auto& cell : result.cells) {
    if (cell.flags & (kRepeatedRoots | kRZero)) {
      ++result.excluded;
      continue;
    }
    result.min_mobius = std::min(result.min_mobius, cell.mobius);
    result.min_sigma_min = std::min(result.min_sigma_min, cell.sigma_min);
    result.min_sigma5 = std::min(result.min_sigma5, cell.sigma5);
  }
  return result;
}

CriticalConstants critical_constants(double L) {
  if (!(L > 0.0)) throw Error(ErrorKind::domain, "critical_constants requires L > 0");
  const double s5 = std::sqrt(5.0);
  CriticalConstants c;
  c.a = std::sqrt((s5 + 1.0) / 2.0);
  c.b = std::sqrt((s5 - 1.0) / 2.0);
  c.C2 = -std::expm1(-c.a * L);
  c.C3 = std::expm1(c.a * L);
  c.A = c.C2 + c.C3;
  c.B = c.C2 - c.C3;
  const double ratio = (c.a * c.a) / (c.b * c.b);
  c.C1 = -(1.0 + ratio) * c.A;
  c.C4 = ratio * c.A;
  c.C5 = -(c.a / c.b) * c.B;
  return c;
}

namespace {

// b L - 2 arg(C4 + i C5), reduced to (-pi, pi].
double wrapped_phase(double L) {
  const auto c = critical_constants(L);
  return std::remainder(c.b * L - 2.0 * std::atan2(c.C5, c.C4), 2.0 * std::numbers::pi);
}

}  // namespace

double membership_residual(double L) {
  const auto c = critical_constants(L);
  const cplx p = cplx(c.C4, c.C5) / std::abs(cplx(c.C4, c.C5));
  return std::abs(std::exp(I * c.b * L) - p * p);
}

CriticalSetHit evaluate_critical_length(double L) {
  CriticalSetHit hit;
  hit.L = L;
  hit.membership_residual = membership_residual(L);
  hit.constants = critical_constants(L);
  const auto& c = hit.constants;
  hit.max_abs_C = std::max({std::abs(c.C1), std::abs(c.C2), std::abs(c.C3), std::abs(c.C4),
                            std::abs(c.C5)});

  // k-th derivative of u at x.
  auto deriv = [&c](double x, int k) {
    const double ea = std::exp(c.a * x), em = std::exp(-c.a * x);
    const double pa = std::pow(c.a, k), pb = std::pow(c.b, k);
    const double sign_m = (k % 2 == 0) ? 1.0 : -1.0;
    // cos^(k)(b x) = b^k cos(b x + k pi/2), sin^(k)(b x) = b^k sin(b x + k pi/2)
    const double shift = k * std::numbers::pi / 2.0;
    double v = c.C2 * pa * ea + c.C3 * sign_m * pa * em +
               c.C4 * pb * std::cos(c.b * x + shift) + c.C5 * pb * std::sin(c.b * x + shift);
    if (k == 0) v += c.C1;
    return v;
  };

  constexpr int kPoints = 2001;
  double max_res = 0.0;
  for (int i = 0; i < kPoints; ++i) {
    const double x = L * static_cast<double>(i) / (kPoints - 1);
    hit.max_abs_u = std::max(hit.max_abs_u, std::abs(deriv(x, 0)));
    max_res = std::max(max_res, std::abs(-deriv(x, 5) + deriv(x, 3) + deriv(x, 1)));
  }
  hit.ode_residual = hit.max_abs_u > 0.0 ? max_res / hit.max_abs_u
                                         : std::numeric_limits<double>::infinity();
  for (int side = 0; side < 2; ++side)
    for (int k = 0; k < 3; ++k)
      hit.bc_residuals[3 * side + k] = std::abs(deriv(side == 0 ? 0.0 : L, k)) / hit.max_abs_C;
  return hit;
}

std::vector<CriticalSetHit> find_critical_lengths(double L_lo, double L_hi) {
  if (!(L_lo > 0.0) || !(L_hi <= 200.0) || !(L_lo < L_hi))
    throw Error(ErrorKind::precondition, "critical-length range must satisfy 0 < lo < hi <= 200");
  // The phase moves at rate about b < 1, so this step keeps |dtheta| far
  // below pi/2.
  constexpr double kStep = 1e-2;
  const int n = static_cast<int>(std::ceil((L_hi - L_lo) / kStep));
  std::vector<CriticalSetHit> hits;
  double x0 = L_lo, f0 = wrapped_phase(x0);
  for (int i = 1; i <= n; ++i) {
    const double x1 = std::min(L_hi, L_lo + i * kStep);
    const double f1 = wrapped_phase(x1);
    const bool bracket = (f0 == 0.0) || (f0 < 0.0) != (f1 < 0.0);
    if (bracket && std::abs(f0) < std::numbers::pi / 2 && std::abs(f1) < std::numbers::pi / 2) {
      double lo = x0, hi = x1, flo = f0;
      double best = std::abs(f0) <= std::abs(f1) ? x0 : x1;
      for (int it = 0; it < 200 && flo != 0.0; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double fm = wrapped_phase(mid);
        if (std::abs(fm) < std::abs(wrapped_phase(best))) best = mid;
        if (fm == 0.0) break;
        if ((fm < 0.0) == (flo < 0.0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      if (hits.empty() || std::abs(hits.back().L - best) > kStep)
        hits.push_back(evaluate_critical_length(best));
    }
    x0 = x1;
    f0 = f1;
  }
  return hits;
}

}  // namespace kawahara::spectral
