#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "kawahara/error.hpp"
#include "kawahara/spectral.hpp"

using namespace kawahara;
using namespace kawahara::spectral;
using doctest::Approx;

namespace {

const double rho0 = std::sqrt((std::sqrt(5.0) - 1) / 2);
const double kappa0 = std::sqrt((std::sqrt(5.0) + 1) / 2);

// Durand-Kerner on xi^5 + xi^3 - xi + r: an iteration unrelated to the
// companion-matrix solver under test.
std::vector<cplx> durand_kerner(double r) {
  std::vector<cplx> z(5);
  for (int k = 0; k < 5; ++k) z[k] = std::pow(cplx(0.4, 0.9), k);
  for (int it = 0; it < 2000; ++it) {
    for (int i = 0; i < 5; ++i) {
      cplx den = 1;
      for (int j = 0; j < 5; ++j)
        if (j != i) den *= z[i] - z[j];
      z[i] -= q_value(z[i], r) / den;
    }
  }
  return z;
}

double match_distance(const RootSet& s, std::vector<cplx> ref) {
  double worst = 0;
  for (const auto& root : s.roots) {
    auto it = std::min_element(ref.begin(), ref.end(), [&](cplx a, cplx b) {
      return std::abs(a - root) < std::abs(b - root);
    });
    worst = std::max(worst, std::abs(*it - root));
    ref.erase(it);
  }
  return worst;
}

// Number of distinct real roots of xi^5 + xi^3 - xi + r from a Sturm sequence.
int sturm_count(double r) {
  using Poly = std::vector<double>;  // highest degree first
  auto trim = [](Poly p) {
    while (p.size() > 1 && std::abs(p.front()) < 1e-13) p.erase(p.begin());
    return p;
  };
  auto rem = [&](Poly a, const Poly& b) {
    while (a.size() >= b.size()) {
      const double f = a.front() / b.front();
      for (std::size_t i = 0; i < b.size(); ++i) a[i] -= f * b[i];
      a.erase(a.begin());
      if (a.empty()) break;
    }
    return trim(a.empty() ? Poly{0} : a);
  };
  std::vector<Poly> seq{{1, 0, 1, 0, -1, r}, {5, 0, 3, 0, -1}};
  while (seq.back().size() > 1) {
    Poly next = rem(seq[seq.size() - 2], seq.back());
    if (next.size() == 1 && std::abs(next[0]) < 1e-13) break;
    for (double& c : next) c = -c;
    seq.push_back(next);
  }
  auto changes = [&](double sign_x) {
    int n = 0;
    double last = 0;
    for (const auto& p : seq) {
      const double lead = p.front() * ((p.size() - 1) % 2 == 1 ? sign_x : 1.0);
      if (lead != 0 && last != 0 && (lead > 0) != (last > 0)) ++n;
      if (lead != 0) last = lead;
    }
    return n;
  };
  return changes(-1.0) - changes(1.0);
}

}  // namespace

TEST_CASE("roots at r = 0") {
  const auto s = q_roots(0);
  const std::vector<cplx> expected{0, rho0, -rho0, cplx(0, kappa0), cplx(0, -kappa0)};
  CHECK(match_distance(s, expected) < 1e-10);
  CHECK(s.classification == RootClass::degenerate_r_zero);
  CHECK(s.real_count == 3);
}

TEST_CASE("roots agree with an independent iteration") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int i = 0; i < 200; ++i) {
    const double r = u(rng);
    const auto s = q_roots(r);
    CHECK(match_distance(s, durand_kerner(r)) < 1e-9);
    cplx sum = 0, prod = 1, pairs = 0;
    for (int a = 0; a < 5; ++a) {
      sum += s.roots[a];
      prod *= s.roots[a];
      for (int b = a + 1; b < 5; ++b) pairs += s.roots[a] * s.roots[b];
    }
    CHECK(std::abs(sum) < 1e-10);
    CHECK(std::abs(prod + r) < 1e-10);
    CHECK(std::abs(pairs - 1.0) < 1e-10);
    if (std::abs(r) > 1e-3) CHECK(s.real_count == sturm_count(r));
  }
}

TEST_CASE("classification around the three-real-roots threshold") {
  const double t = three_real_roots_threshold();
  CHECK(t == Approx(0.344110378981074).epsilon(1e-12));
  CHECK(q_roots(1.0).classification == RootClass::one_real_two_conjugate_pairs);
  CHECK(q_roots(1.0).real_count == 1);
  CHECK(sturm_count(1.0) == 1);
  CHECK(q_roots(0.99 * t).real_count == 3);
  CHECK(sturm_count(0.99 * t) == 3);
  CHECK(q_roots(1.01 * t).real_count == 1);
  CHECK(q_roots(-0.5 * t).classification == RootClass::other);
  const auto s = q_roots(1.0);
  CHECK(s.roots[0].imag() > 0);
  CHECK(s.roots[2] == std::conj(s.roots[0]));
  CHECK(s.roots[4].imag() == 0.0);
  CHECK(s.distinct());
}

TEST_CASE("critical points of q'") {
  const auto c = qprime_critical_points();
  CHECK(c.z2 * c.z2 == Approx(0.23852).epsilon(1e-4));
  CHECK(std::abs(q_derivative(c.z2)) < 1e-14);
  CHECK((c.z1 * c.z1).real() < 0);
  CHECK(std::abs(c.z1.real()) < 1e-15);
  CHECK(std::abs(q_derivative(c.z1)) < 1e-14);
}

TEST_CASE("cross ratio invariances") {
  const std::array<cplx, 4> z{cplx(0.3, 1), cplx(-1, 0.2), cplx(2, -0.5), cplx(0.1, -0.7)};
  const cplx cr = cross_ratio(z);
  // Klein four-group
  CHECK(std::abs(cross_ratio({z[1], z[0], z[3], z[2]}) - cr) < 1e-14);
  CHECK(std::abs(cross_ratio({z[2], z[3], z[0], z[1]}) - cr) < 1e-14);
  CHECK(std::abs(cross_ratio({z[3], z[2], z[1], z[0]}) - cr) < 1e-14);
  // Mobius invariance
  const Mobius m{cplx(1, 2), cplx(0.5), cplx(0.3, -1), cplx(2, 0.1)};
  CHECK(std::abs(cross_ratio({m(z[0]), m(z[1]), m(z[2]), m(z[3])}) - cr) < 1e-12);

  const std::array<cplx, 4> xi{cplx(1.1, 0.4), cplx(-0.7, 0.9), cplx(1.1, -0.4), cplx(-0.7, -0.9)};
  const double base = cross_ratio_mismatch(xi, 2.0);
  CHECK(cross_ratio_mismatch({xi[1], xi[0], xi[3], xi[2]}, 2.0) == Approx(base).epsilon(1e-12));
  CHECK(cross_ratio_mismatch({xi[2], xi[3], xi[0], xi[1]}, 2.0) == Approx(base).epsilon(1e-12));
  CHECK(cross_ratio_mismatch({xi[3], xi[2], xi[1], xi[0]}, 2.0) == Approx(base).epsilon(1e-12));
}

TEST_CASE("Mobius through three points") {
  const std::array<cplx, 3> z{cplx(0, 1), cplx(2, 0), cplx(-1, -1)};
  const std::array<cplx, 3> w{cplx(1, 1), cplx(0, -3), cplx(0.5, 0.2)};
  const auto m = Mobius::through(z, w);
  for (int k = 0; k < 3; ++k) CHECK(std::abs(m(z[k]) - w[k]) < 1e-12);

  const Mobius known{cplx(1, 2), cplx(0.5), cplx(0.3, -1), cplx(2, 0.1)};
  const std::array<cplx, 3> img{known(z[0]), known(z[1]), known(z[2])};
  const auto fit = Mobius::through(z, img);
  const cplx probe(0.7, -0.3);
  CHECK(std::abs(fit(probe) - known(probe)) < 1e-12);
}

TEST_CASE("Mobius residual rules out an exponential-sum eigenfunction") {
  CHECK(mobius_consistency(q_roots(1.0), 1.0) > 1e-6);
  CHECK_THROWS_AS(mobius_residual(q_roots(three_real_roots_threshold()), 1.0, {0, 1, 2}), Error);
}

TEST_CASE("alpha rank test") {
  const auto t = alpha_rank_test(q_roots(1.0), 1.0);
  CHECK(t.sigma_min > 1e-8);
  // the xi = 0 row is [0, 0, 1, -1] / sqrt 2, so |alpha_3 - alpha_4| / sqrt 2 <= sigma_min
  for (double L : {0.5, 2.0, 7.0}) {
    const auto z = alpha_rank_test(q_roots(0.0), L);
    CHECK(std::abs(z.null_alpha[2] - z.null_alpha[3]) / std::sqrt(2.0) <= z.sigma_min + 1e-14);
  }
}

TEST_CASE("boundary matrix rank test") {
  const auto s = q_roots(1.0);
  CHECK(bvp_matrix_test(s, std::numbers::pi) > 1e-8);
  const auto sv = bvp_singular_values(s, std::numbers::pi);
  for (double v : sv) CHECK(v >= 0);
  const auto scaled = bvp_singular_values(s, std::numbers::pi, {1e-3, 2, 5, 0.1, 7});
  CHECK(scaled.back() > 1e-8);

  // synthetic rank-4 matrix: fifth column a combination of the others
  BoundaryMatrix m = boundary_matrix(s, 2.0);
  m.col(4) = 0.3 * m.col(0) - cplx(0, 1.2) * m.col(1) + 0.5 * m.col(3);
  CHECK(singular_values(m).back() < 1e-12);
}

TEST_CASE("r -> -r symmetry of the boundary test") {
  for (double r : {0.2, 0.7, 1.5})
    for (double L : {1.0, 4.5, 13.0})
      CHECK(bvp_matrix_test(q_roots(-r), L) == Approx(bvp_matrix_test(q_roots(r), L)).epsilon(1e-9));
}

TEST_CASE("spectral scan") {
  CHECK(spectral_scan(0, 1, 1, 2, 0, 10).cells.empty());
  CHECK(spectral_scan(1, 0, 1, 2, 10, 10).cells.empty());
  const auto s = spectral_scan(-1, 1, 0.5, 5, 11, 7);
  CHECK(s.cells.size() == 77);
  CHECK(s.cells.front().r == -1.0);
  CHECK(s.cells.back().L == 5.0);
  bool saw_zero = false;
  for (const auto& c : s.cells)
    if (c.r == 0.0) {
      saw_zero = true;
      CHECK((c.flags & kRZero) != 0);
    }
  CHECK(saw_zero);
  CHECK(s.excluded >= 7);
  CHECK(s.min_sigma5 > 0);
}

TEST_CASE("critical constants") {
  const auto c = critical_constants(1.3);
  CHECK(c.a * c.a == Approx((std::sqrt(5.0) + 1) / 2));
  CHECK(c.b * c.b == Approx((std::sqrt(5.0) - 1) / 2));
  CHECK(c.a * c.a / (c.b * c.b) == Approx((3 + std::sqrt(5.0)) / 2));
  CHECK(c.A == Approx(2 * std::sinh(c.a * 1.3)));
  CHECK(c.A == Approx(c.C2 + c.C3));
  const auto tiny = critical_constants(1e-9);
  for (double v : {tiny.C1, tiny.C2, tiny.C3, tiny.C4, tiny.C5}) CHECK(std::abs(v) < 1e-7);
}

TEST_CASE("critical lengths") {
  const auto hits = find_critical_lengths(1e-3, 50);
  REQUIRE(!hits.empty());
  CHECK(hits.front().L == Approx(9.4006).epsilon(1e-4));
  for (const auto& h : hits) {
    CHECK(h.membership_residual < 1e-12);
    CHECK(h.ode_residual < 1e-6);
    for (double bc : h.bc_residuals) CHECK(bc < 1e-8);
    CHECK(h.max_abs_u > 0);
  }
  for (std::size_t i = 1; i < hits.size(); ++i)
    CHECK(membership_residual(0.5 * (hits[i - 1].L + hits[i].L)) > 1e-3);
  CHECK_THROWS_AS(find_critical_lengths(0, 10), Error);
  CHECK_THROWS_AS(find_critical_lengths(5, 1), Error);
}
