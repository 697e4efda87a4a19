#pragma once

// Energy-type functionals of the pair (u, z).

#include "kawahara/delay_line.hpp"
#include "kawahara/model.hpp"
#include "kawahara/spatial.hpp"

namespace kawahara::diagnostics {

struct DelayIntegrals {
  double z2 = 0.0;           // int_0^1 z^2 drho
  double weighted_z2 = 0.0;  // int_0^1 (1 - rho) z^2 drho
};

/// Trapezoidal rule over the line's profile nodes.
DelayIntegrals delay_integrals(const timeloop::DelayLine& line);

/// int u^2 dx + h |beta| int z^2 drho.
double energy(const spatial::VectorRef& u, const timeloop::DelayLine& line,
              const spatial::Grid& grid, const model::SystemParams& params);

/// E + mu1 int x u^2 dx + mu2 h int (1 - rho) z^2 drho.
double lyapunov(const spatial::VectorRef& u, const timeloop::DelayLine& line,
                const spatial::Grid& grid, const model::SystemParams& params, double mu1,
                double mu2);

struct SandwichVerdict {
  bool ok = false;
  double lower_slack = 0.0;  // V - E
  double upper_slack = 0.0;  // kappa E - V
  double kappa = 1.0;
};

/// E <= V <= (1 + max{mu1 L, mu2/|beta|}) E with relative slack 1e-12.
SandwichVerdict sandwich_check(double E, double V, const model::SystemParams& params,
                               double mu1, double mu2);

}  // namespace kawahara::diagnostics
