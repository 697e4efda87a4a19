#include "kawahara/convergence.hpp"

#include <cmath>

#include "kawahara/error.hpp"
#include "kawahara/parallel.hpp"

namespace kawahara::verification {

double Poly::operator()(double x) const {
  double out = 0.0;
  for (std::size_t k = c.size(); k-- > 0;) out = out * x + c[k];
  return out;
}

Poly Poly::derivative(int times) const {
  Poly p = *this;
  for (int t = 0; t < times; ++t) {
    std::vector<double> d;
    for (std::size_t k = 1; k < p.c.size(); ++k) d.push_back(static_cast<double>(k) * p.c[k]);
    p.c = d.empty() ? std::vector<double>{0.0} : d;
  }
  return p;
}

Poly operator*(const Poly& p, const Poly& q) {
  Poly out{std::vector<double>(p.c.size() + q.c.size() - 1, 0.0)};
  for (std::size_t i = 0; i < p.c.size(); ++i)
    for (std::size_t j = 0; j < q.c.size(); ++j) out.c[i + j] += p.c[i] * q.c[j];
  return out;
}

Poly power(const Poly& p, int n) {
  Poly out{{1.0}};
  for (int k = 0; k < n; ++k) out = out * p;
  return out;
}

double Manufactured::exact(double t, double x) const { return std::exp(-t) * w(x); }

timeloop::Source Manufactured::source() const {
  const Poly w1 = w.derivative(1), w3 = w.derivative(3), w5 = w.derivative(5);
  return [w = w, w1, w3, w5, a = params.a, b = params.b, p = params.p,
          nl = nonlinear](double t, double x) {
    const double e = std::exp(-t);
    double f = e * (-w(x) + a * w1(x) + b * w3(x) - w5(x));
    if (nl) f += std::pow(e * w(x), p) * e * w1(x);
    return f;
  };
}

timeloop::InitialData Manufactured::initial_data() const {
  const double trace = w.derivative(2)(0.0);
  return {[w = w](double x) { return w(x); },
          [trace](double s) { return trace * std::exp(-s); }};
}

Manufactured cubic_bump(const model::SystemParams& params) {
  const Poly bump{{0.0, params.L, -1.0}};  // x (L - x)
  return {params, power(bump, 3)};
}

Manufactured feedback_bump(const model::SystemParams& params) {
  const double k = (params.alpha + params.beta * std::exp(params.h) - 1.0) / params.L;
  const Poly bump{{0.0, params.L, -1.0}};
  return {params, power(bump, 2) * Poly{{1.0, k}}};
}

namespace {

std::vector<double> orders_of(const std::vector<double>& values) {
  std::vector<double> out;
  for (std::size_t k = 1; k < values.size(); ++k) out.push_back(std::log2(values[k - 1] / values[k]));
  return out;
}

}  // namespace

ConvergenceReport convergence_study(const Manufactured& m, const ConvergenceOptions& options) {
  if (options.space_N.size() == 1 || options.time_dt.size() == 1 ||
      (options.space_N.empty() && options.time_dt.empty()))
    throw Error(ErrorKind::precondition,
                "convergence study needs at least 2 grids or 2 time steps per study");
  const std::size_t ns = options.space_N.size(), nt = options.time_dt.size();
  std::vector<timeloop::RunRecord> runs(ns + nt);
  parallel_for(ns + nt, [&](std::size_t i) {
    timeloop::SimulationOptions sim;
    sim.T = options.T;
    sim.mode = m.nonlinear ? timeloop::Mode::nonlinear : timeloop::Mode::linear;
    sim.scheme = options.scheme;
    sim.source = m.source();
    sim.record_stride = 1 << 30;
    if (i < ns) {
      sim.N = options.space_N[i];
      sim.dt = options.space_dt;
    } else {
      sim.N = options.time_N;
      sim.dt = options.time_dt[i - ns];
    }
    runs[i] = timeloop::simulate(m.params, m.initial_data(), sim);
  });

  ConvergenceReport report;
  for (std::size_t i = 0; i < ns; ++i) {
    const auto& run = runs[i];
    double err = 0.0;
    for (int j = 1; j < run.grid.N; ++j)
      err = std::max(err, std::abs(run.u_final[j - 1] - m.exact(options.T, run.grid.x(j))));
    report.space_errors.push_back(err);
  }
  for (std::size_t i = ns + 1; i < ns + nt; ++i)
    report.time_differences.push_back(
        (runs[i - 1].u_final - runs[i].u_final).lpNorm<Eigen::Infinity>());
  report.space_orders = orders_of(report.space_errors);
  report.time_orders = orders_of(report.time_differences);
  return report;
}

}  // namespace kawahara::verification
