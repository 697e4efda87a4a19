#pragma once

// Spectral audit of the overdetermined eigenvalue problem
//   lambda u + u' + u''' - u''''' = 0,  u = u' = u'' = 0 at x = 0 and x = L,
// with lambda = -i r. Exponential solutions e^{i xi x} require
//   q(xi) = xi^5 + xi^3 - xi + r = 0.
// Everything here uses that normalization (a = b = 1).

#include <Eigen/Core>
#include <array>
#include <complex>
#include <cstdint>
#include <vector>

namespace kawahara::spectral {

using cplx = std::complex<double>;

cplx q_value(cplx xi, double r);
cplx q_derivative(cplx xi);

enum class RootClass { one_real_two_conjugate_pairs, degenerate_r_zero, other };
const char* to_string(RootClass c);

/// Roots closer than this are treated as one repeated root.
inline constexpr double kRepeatTolerance = 1e-8;

struct RootSet {
  double r = 0.0;
  /// Ordered: roots with Im > 0 (by real part), then their conjugates in the
  /// same order, then the real roots ascending.
  std::array<cplx, 5> roots{};
  /// multiplicity[i] = number of roots within kRepeatTolerance of roots[i].
  std::array<int, 5> multiplicity{};
  RootClass classification = RootClass::other;
  int real_count = 0;

  bool distinct() const;
};

/// Companion-matrix eigenvalues polished by Newton's method.
RootSet q_roots(double r);

struct CriticalPoints {
  cplx z1;    // sqrt((-3 - sqrt 29) / 10), purely imaginary
  double z2;  // sqrt((-3 + sqrt 29) / 10), real
};
CriticalPoints qprime_critical_points();

/// |z2^5 + z2^3 - z2|: q has three distinct real roots for 0 < |r| below
/// this value, a double real root at it and a single real root above it.
double three_real_roots_threshold();

/// Cross ratio (z1, z2; z3, z4) = (z1 - z3)(z2 - z4) / ((z2 - z3)(z1 - z4)).
cplx cross_ratio(const std::array<cplx, 4>& z);

/// |CR(xi) - CR(w)| / max(1, |CR(xi)|, |CR(w)|) with w_i = e^{-i L xi_i}. A
/// Mobius map sending every xi_i to w_i exists iff this vanishes. Invariant
/// under relabelings that preserve the cross ratio.
double cross_ratio_mismatch(const std::array<cplx, 4>& xi, double L);

/// z -> (a z + b) / (c z + d).
struct Mobius {
  cplx a, b, c, d;
  cplx operator()(cplx z) const { return (a * z + b) / (c * z + d); }

  /// The unique map with z_k -> w_k (k = 0, 1, 2), built from the cross
  /// ratio normal forms of both triples.
  static Mobius through(const std::array<cplx, 3>& z, const std::array<cplx, 3>& w);
};

/// Fits the Mobius map through (xi_a, w_a) for the three anchor indices and
/// returns the largest relative deviation |M(xi) - w| / |w| over the two
/// remaining roots. Throws Error(domain) on repeated roots.
double mobius_residual(const RootSet& roots, double L, std::array<int, 3> anchors);

/// mobius_residual with anchors (0, 1, 2): for the generic ordering the
/// tested quadruple is {xi_1, xi_2, conj xi_1, conj xi_2}.
double mobius_consistency(const RootSet& roots, double L);

struct AlphaTest {
  double sigma_min = 0.0;
  std::array<cplx, 4> null_alpha{};
  cplx d_alpha;  // alpha_1 alpha_3 - alpha_2 alpha_4
};

/// Smallest singular value of the 5x4 matrix with rows
/// [i xi, -i xi e^{-i xi L}, 1, -e^{-i xi L}] (rows scaled to unit norm;
/// repeated roots contribute xi-derivative rows).
AlphaTest alpha_rank_test(const RootSet& roots, double L);

/// Fifth singular value of the 6x5 matrix of boundary functionals
/// (v, v', v'') at 0 and L applied to v = e^{i xi_j x} (columns scaled to
/// unit norm; repeated roots contribute xi-derivative columns).
double bvp_matrix_test(const RootSet& roots, double L);

using BoundaryMatrix = Eigen::Matrix<cplx, 6, 5>;

/// Columns (v, v', v'') at 0 then at L for v = e^{i xi_j x}, normalized and
/// then multiplied by column_scale[j].
BoundaryMatrix boundary_matrix(const RootSet& roots, double L,
                               const std::array<double, 5>& column_scale = {1, 1, 1, 1, 1});

/// Singular values, descending.
std::vector<double> singular_values(const BoundaryMatrix& m);

/// Singular values of the 6x5 boundary matrix, descending (exposed for the
/// column-scaling checks).
std::vector<double> bvp_singular_values(const RootSet& roots, double L,
                                        const std::array<double, 5>& column_scale = {1, 1, 1, 1, 1});

enum ScanFlag : std::uint32_t {
  kRepeatedRoots = 1u << 0,  // excluded from the minima
  kThreeRealRoots = 1u << 1, // 0 < |r| < three_real_roots_threshold()
  kRZero = 1u << 2,
};

struct ScanCell {
  double r = 0.0;
  double L = 0.0;
  double mobius = 0.0;
  double sigma_min = 0.0;
  double sigma5 = 0.0;
  std::uint32_t flags = 0;
};

struct ScanResult {
  int nr = 0, nL = 0;
  std::vector<ScanCell> cells;  // row-major: r index outer, L index inner
  std::size_t excluded = 0;
  double min_mobius = 0.0, min_sigma_min = 0.0, min_sigma5 = 0.0;
};

/// Uniform nr x nL grid including both endpoints of each range (a single
/// point uses the lower end). nr * nL <= 1e7.
ScanResult spectral_scan(double r_lo, double r_hi, double L_lo, double L_hi, int nr, int nL);

struct CriticalConstants {
  double a = 0.0, b = 0.0;
  double A = 0.0, B = 0.0;
  double C1 = 0.0, C2 = 0.0, C3 = 0.0, C4 = 0.0, C5 = 0.0;
};

/// Constants of the steady state u = C1 + C2 e^{a x} + C3 e^{-a x}
///   + C4 cos(b x) + C5 sin(b x) of -u''''' + u''' + u' = 0, with
/// a = sqrt((sqrt5 + 1)/2), b = sqrt((sqrt5 - 1)/2).
CriticalConstants critical_constants(double L);

/// |e^{i b L} - ((C4 + i C5) / |C4 + i C5|)^2|.
double membership_residual(double L);

struct CriticalSetHit {
  double L = 0.0;
  double membership_residual = 0.0;
  CriticalConstants constants;
  double max_abs_u = 0.0;
  double max_abs_C = 0.0;
  /// sup |-u''''' + u''' + u'| / max|u| over a uniform grid of 2001 points.
  double ode_residual = 0.0;
  /// |u|, |u'|, |u''| at 0 then at L, each divided by max|C_i|.
  std::array<double, 6> bc_residuals{};
};

/// Brackets zeros of the wrapped phase e^{i b L} conj(P^2) on a fine grid
/// over [L_lo, L_hi] and bisects each one.
std::vector<CriticalSetHit> find_critical_lengths(double L_lo, double L_hi);

CriticalSetHit evaluate_critical_length(double L);

}  // namespace kawahara::spectral
