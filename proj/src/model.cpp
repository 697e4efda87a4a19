#include "kawahara/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "kawahara/error.hpp"

namespace kawahara::model {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double safe_ratio(double num, double den) {
  if (den == 0.0) return kInf;
  return num / den;
}

}  // namespace

ValidationReport validate_params(const SystemParams& params) {
  ValidationReport report;
  if (!(params.a > 0.0)) report.violations.emplace_back("a>0");
  if (!(params.b > 0.0)) report.violations.emplace_back("b>0");
  if (!(params.h > 0.0)) report.violations.emplace_back("h>0");
  if (!(params.L > 0.0)) report.violations.emplace_back("L>0");
  if (!(std::abs(params.alpha) + std::abs(params.beta) < 1.0))
    report.violations.emplace_back("|alpha|+|beta|<1");
  if (params.p != 1 && params.p != 2) report.violations.emplace_back("p in {1,2}");

  report.length_ok = params.a > 0.0 && params.b > 0.0 && params.L > 0.0 &&
                     params.L < length_bound(params.a, params.b);
  return report;
}

double length_bound(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0))
    throw Error(ErrorKind::domain, "length_bound requires a > 0 and b > 0");
  return std::sqrt(3.0 * b / a) * std::numbers::pi;
}

double smallness_radius(const SystemParams& params) {
  constexpr double pi = std::numbers::pi;
  const double radicand =
      (3.0 * params.b * pi * pi - params.L * params.L * params.a) / params.L;
  if (!(params.L > 0.0) || !(radicand > 0.0))
    throw Error(ErrorKind::domain,
                "smallness_radius requires 0 < L < sqrt(3b/a) pi");
  return 2.0 / pi * std::sqrt(radicand);
}

GainMatrix gain_matrix_M(double alpha, double beta) {
  const double ab = std::abs(beta);
  return {alpha * alpha - 1.0 + ab, alpha * beta, beta * beta - ab};
}

GainMatrix gain_matrix_Mstar(double alpha, double beta) {
  const double ab = std::abs(beta);
  return {alpha * alpha - 1.0 + ab, alpha * ab, beta * beta - ab};
}

GainMatrix perturbed_matrix(double alpha, double beta, double L, double mu1,
                            double mu2) {
  GainMatrix m = gain_matrix_M(alpha, beta);
  const double w = L * mu1;
  m.m11 += w * alpha * alpha + mu2;
  m.m12 += w * alpha * beta;
  m.m22 += w * beta * beta;
  return m;
}

bool is_negative_definite(const GainMatrix& m) {
  return m.m11 < 0.0 && m.det() > 0.0;
}

double MuBounds::mu1_sup(double mu2) const {
  const double ab = std::abs(beta);
  const double a2 = alpha * alpha;
  const double first = safe_ratio(1.0 - ab - mu2 - a2, L * a2);
  const double second =
      safe_ratio((ab - 1.0) * (ab - 1.0) - a2 - mu2 * (1.0 - ab),
                 L * (a2 - beta * beta + ab * (1.0 - mu2)));
  return std::min(first, second);
}

MuBounds mu_bounds(double alpha, double beta, double L) {
  const double ab = std::abs(beta);
  const double a2 = alpha * alpha;
  MuBounds bounds{alpha, beta, L, 0.0};
  bounds.mu2_sup = std::min({1.0 - ab - a2,
                             safe_ratio((ab - 1.0) * (ab - 1.0) - a2, 1.0 - ab),
                             safe_ratio(a2 - beta * beta + ab, ab)});
  return bounds;
}

Certificate decay_certificate(const SystemParams& params, double mu1, double mu2,
                              double r) {
  constexpr double pi = std::numbers::pi;
  const auto report = validate_params(params);
  if (!report.ok())
    throw Error(ErrorKind::refused,
                "certificate refused: violated constraint " + report.violations.front());
  if (!report.length_ok)
    throw Error(ErrorKind::refused, "certificate refused: L >= sqrt(3b/a) pi");
  if (params.beta == 0.0)
    throw Error(ErrorKind::refused,
                "certificate refused: beta = 0 leaves mu2/|beta| undefined");
  if (!(mu1 > 0.0 && mu1 < 1.0) || !(mu2 > 0.0 && mu2 < 1.0))
    throw Error(ErrorKind::refused, "certificate refused: weights must lie in (0,1)");
  const double r_max = smallness_radius(params);
  if (!(r >= 0.0) || !(r < r_max))
    throw Error(ErrorKind::refused,
                "certificate refused: radius r must satisfy 0 <= r < smallness radius");

  Certificate cert;
  cert.mu1 = mu1;
  cert.mu2 = mu2;
  cert.r = r;
  cert.m_negdef = is_negative_definite(gain_matrix_M(params.alpha, params.beta));
  cert.m_mu_negdef = is_negative_definite(
      perturbed_matrix(params.alpha, params.beta, params.L, mu1, mu2));
  if (!cert.m_mu_negdef)
    throw Error(ErrorKind::refused,
                "certificate refused: perturbed gain matrix is not negative definite");

  const double ab = std::abs(params.beta);
  const double L = params.L;
  cert.lambda_delay = mu2 / (2.0 * params.h * (mu2 + ab));
  cert.lambda_length = (3.0 * params.b * pi * pi - r * r * L - L * L * params.a) * mu1 /
                       (2.0 * L * L * (1.0 + L * mu1));
  cert.lambda = std::min(cert.lambda_delay, cert.lambda_length);
  cert.kappa = 1.0 + std::max(L * mu1, mu2 / ab);
  return cert;
}

std::pair<double, double> default_weights(const SystemParams& params) {
  const auto bounds = mu_bounds(params.alpha, params.beta, params.L);
  const double mu2 = std::min(0.5 * bounds.mu2_sup, 0.5);
  const double mu1 = std::min(0.5 * bounds.mu1_sup(mu2), 0.5);
  return {mu1, mu2};
}

}  // namespace kawahara::model
