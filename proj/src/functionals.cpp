#include "kawahara/functionals.hpp"

#include <algorithm>
#include <cmath>

#include "kawahara/error.hpp"

namespace kawahara::diagnostics {

DelayIntegrals delay_integrals(const timeloop::DelayLine& line) {
  const auto nodes = line.profile();
  DelayIntegrals out;
  for (std::size_t k = 1; k < nodes.size(); ++k) {
    const auto [r0, z0] = nodes[k - 1];
    const auto [r1, z1] = nodes[k];
    const double w = 0.5 * (r1 - r0);
    out.z2 += w * (z0 * z0 + z1 * z1);
    out.weighted_z2 += w * ((1.0 - r0) * z0 * z0 + (1.0 - r1) * z1 * z1);
  }
  return out;
}

double energy(const spatial::VectorRef& u, const timeloop::DelayLine& line,
              const spatial::Grid& grid, const model::SystemParams& params) {
  double e = spatial::l2_norm_sq(u, grid);
  if (params.beta != 0.0) e += params.h * std::abs(params.beta) * delay_integrals(line).z2;
  return e;
}

double lyapunov(const spatial::VectorRef& u, const timeloop::DelayLine& line,
                const spatial::Grid& grid, const model::SystemParams& params, double mu1,
                double mu2) {
  const auto integrals = delay_integrals(line);
  return spatial::l2_norm_sq(u, grid) +
         params.h * std::abs(params.beta) * integrals.z2 +
         mu1 * spatial::l2_norm_sq(u, grid, spatial::Weight::x) +
         mu2 * params.h * integrals.weighted_z2;
}

SandwichVerdict sandwich_check(double E, double V, const model::SystemParams& params,
                               double mu1, double mu2) {
  constexpr double kSlack = 1e-12;
  SandwichVerdict verdict;
  const double ab = std::abs(params.beta);
  if (ab == 0.0) throw Error(ErrorKind::precondition, "sandwich_check requires beta != 0");
  verdict.kappa = 1.0 + std::max(mu1 * params.L, mu2 / ab);
  verdict.lower_slack = V - E;
  verdict.upper_slack = verdict.kappa * E - V;
  const double scale = std::max({std::abs(E), std::abs(V), 0.0});
  verdict.ok = verdict.lower_slack >= -kSlack * scale && verdict.upper_slack >= -kSlack * scale;
  return verdict;
}

}  // namespace kawahara::diagnostics
