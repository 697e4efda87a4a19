#pragma once

// Physical/control parameters of the delayed-boundary Kawahara system and the
// closed-form stability certificates derived from its Lyapunov functional.

#include <string>
#include <utility>
#include <vector>

namespace kawahara::model {

/// Parameters of
///   u_t + a u_x + b u_xxx - u_xxxxx + u^p u_x = 0  on (0, L),
///   u = u_x = 0 at both ends,
///   u_xx(t, L) = alpha u_xx(t, 0) + beta u_xx(t - h, 0).
struct SystemParams {
  double a = 1.0;
  double b = 1.0;
  int p = 2;
  double alpha = 0.0;
  double beta = 0.0;
  double h = 1.0;
  double L = 1.0;
};

struct ValidationReport {
  /// Human-readable names of the violated core constraints, e.g. "a>0".
  std::vector<std::string> violations;
  /// L < sqrt(3b/a) pi. Only needed for the Lyapunov certificate.
  bool length_ok = false;

  bool ok() const { return violations.empty(); }
};

ValidationReport validate_params(const SystemParams& params);

/// sqrt(3b/a) * pi, the largest interval length covered by the certificate.
double length_bound(double a, double b);

/// (2/pi) sqrt((3 b pi^2 - L^2 a) / L); requires L < length_bound(a, b).
double smallness_radius(const SystemParams& params);

/// Symmetric 2x2 matrix stored by its upper triangle.
struct GainMatrix {
  double m11 = 0.0;
  double m12 = 0.0;
  double m22 = 0.0;

  double det() const { return m11 * m22 - m12 * m12; }
  /// x^T M x for x = (x1, x2).
  double quadratic_form(double x1, double x2) const {
    return m11 * x1 * x1 + 2.0 * m12 * x1 * x2 + m22 * x2 * x2;
  }

  friend bool operator==(const GainMatrix&, const GainMatrix&) = default;
};

GainMatrix gain_matrix_M(double alpha, double beta);
GainMatrix gain_matrix_Mstar(double alpha, double beta);

/// M + L mu1 [a^2, ab; ab, b^2] + mu2 [1, 0; 0, 0].
GainMatrix perturbed_matrix(double alpha, double beta, double L, double mu1,
                            double mu2);

/// m11 < 0 and det > 0.
bool is_negative_definite(const GainMatrix& m);

/// Sufficient windows for the Lyapunov weights that keep the perturbed gain
/// matrix negative definite. Bounds whose denominator vanishes (alpha = 0 or
/// beta = 0) are reported as +infinity.
struct MuBounds {
  double alpha = 0.0;
  double beta = 0.0;
  double L = 0.0;
  double mu2_sup = 0.0;

  double mu1_sup(double mu2) const;
};

MuBounds mu_bounds(double alpha, double beta, double L);

struct Certificate {
  double mu1 = 0.0;
  double mu2 = 0.0;
  double r = 0.0;
  /// Decay exponent: E(t) <= kappa E(0) exp(-2 lambda t).
  double lambda = 0.0;
  double lambda_delay = 0.0;   // mu2 / (2 h (mu2 + |beta|))
  double lambda_length = 0.0;  // (3 b pi^2 - r^2 L - L^2 a) mu1 / (2 L^2 (1 + L mu1))
  double kappa = 1.0;
  bool m_negdef = false;
  bool m_mu_negdef = false;
};

/// Largest decay rate permitted by the Lyapunov argument. Throws
/// Error(refused) when a hypothesis fails (gains, length, radius, weights,
/// beta = 0, or a perturbed matrix that is not negative definite).
Certificate decay_certificate(const SystemParams& params, double mu1, double mu2,
                              double r);

/// Weights at half their admissible suprema: mu2 = mu2_sup / 2, then
/// mu1 = mu1_sup(mu2) / 2, both clipped into (0, 1).
std::pair<double, double> default_weights(const SystemParams& params);

}  // namespace kawahara::model
