#include "kawahara/delay_line.hpp"

#include <algorithm>
#include <cmath>

#include "kawahara/error.hpp"

namespace kawahara::timeloop {

namespace {

constexpr double kSnap = 1e-9;

bool near_integer(double value, double& rounded) {
  rounded = std::round(value);
  return std::abs(value - rounded) <= kSnap * std::max(1.0, std::abs(value));
}

}  // namespace

std::size_t delay_steps(double h, double dt) {
  if (!(h > 0.0)) throw Error(ErrorKind::precondition, "delay h must be positive");
  if (!(dt > 0.0) || dt > h * (1.0 + kSnap))
    throw Error(ErrorKind::precondition,
                "time step must satisfy 0 < dt <= h (delayed data must already be recorded)");
  double rounded = 0.0;
  const double ratio = h / dt;
  if (near_integer(ratio, rounded)) return static_cast<std::size_t>(rounded);
  return static_cast<std::size_t>(std::ceil(ratio));
}

DelayLine::DelayLine(double h, double dt, std::size_t capacity, double t0)
    : h_(h), dt_(dt), t0_(t0), buffer_(capacity, 0.0) {
  const std::size_t needed = delay_steps(h, dt) + 1;
  if (capacity < needed)
    throw Error(ErrorKind::precondition, "delay line capacity must be at least ceil(h/dt)+1");
  double rounded = 0.0;
  if (near_integer(h / dt, rounded)) steps_per_delay_ = static_cast<std::size_t>(rounded);
}

double DelayLine::lag(std::size_t k) const {
  const std::size_t n = buffer_.size();
  if (k >= n) throw Error(ErrorKind::precondition, "delay line lag beyond recorded history");
  return buffer_[(head_ + n - k) % n];
}

double DelayLine::value_at_lag(double lag_steps) const {
  const double max_lag = static_cast<double>(buffer_.size() - 1);
  if (lag_steps < -kSnap || lag_steps > max_lag * (1.0 + kSnap) + kSnap)
    throw Error(ErrorKind::precondition, "delay line queried outside recorded history");
  double rounded = 0.0;
  if (near_integer(lag_steps, rounded))
    return lag(static_cast<std::size_t>(std::clamp(rounded, 0.0, max_lag)));
  const double clamped = std::clamp(lag_steps, 0.0, max_lag);
  const auto lo = static_cast<std::size_t>(std::floor(clamped));
  const std::size_t hi = std::min(lo + 1, buffer_.size() - 1);
  const double frac = clamped - static_cast<double>(lo);
  return (1.0 - frac) * lag(lo) + frac * lag(hi);
}

double DelayLine::sample(double rho) const {
  if (rho < 0.0 || rho > 1.0) throw Error(ErrorKind::precondition, "rho must lie in [0,1]");
  if (rho == 1.0 && steps_per_delay_ > 0) return lag(steps_per_delay_);
  return value_at_lag(rho * h_ / dt_);
}

void DelayLine::push(double trace) {
  head_ = (head_ + 1) % buffer_.size();
  buffer_[head_] = trace;
  ++steps_;
}

void DelayLine::set_newest(double trace) { buffer_[head_] = trace; }

std::vector<std::pair<double, double>> DelayLine::profile() const {
  std::vector<std::pair<double, double>> nodes;
  if (steps_per_delay_ > 0) {
    for (std::size_t k = 0; k <= steps_per_delay_; ++k)
      nodes.emplace_back(static_cast<double>(k) / static_cast<double>(steps_per_delay_), lag(k));
    return nodes;
  }
  const double step = dt_ / h_;
  for (std::size_t k = 0; static_cast<double>(k) * step < 1.0; ++k)
    nodes.emplace_back(static_cast<double>(k) * step, lag(k));
  nodes.emplace_back(1.0, value_at_lag(h_ / dt_));
  return nodes;
}

DelayLine init_delay_line(const std::function<double(double)>& z0, double h, double dt) {
  const std::size_t K = delay_steps(h, dt);
  // Fill oldest first so the newest sample is z0(0) and the clock ends at 0.
  DelayLine filled(h, dt, K + 1, -static_cast<double>(K + 1) * dt);
  for (std::size_t k = K + 1; k-- > 0;) filled.push(z0(-static_cast<double>(k) * dt));
  return filled;
}

double feedback_value(const DelayLine& line, double alpha, double beta, double current_trace) {
  return alpha * current_trace + beta * line.sample(1.0);
}

UpwindTransport::UpwindTransport(double h, int cells,
                                 const std::function<double(double)>& z_initial)
    : h_(h), z_(static_cast<std::size_t>(cells) + 1) {
  if (cells < 1) throw Error(ErrorKind::precondition, "transport needs at least one cell");
  for (int i = 0; i <= cells; ++i) z_[static_cast<std::size_t>(i)] = z_initial(static_cast<double>(i) / cells);
}

void UpwindTransport::advance(double dt, double inflow) {
  const int M = cells();
  const double drho = 1.0 / M;
  const int substeps = std::max(1, static_cast<int>(std::ceil(dt / (h_ * drho))));
  const double tau = dt / substeps;
  const double courant = tau / (h_ * drho);
  const double start = z_[0];
  for (int s = 1; s <= substeps; ++s) {
    for (int i = M; i >= 1; --i) z_[i] -= courant * (z_[i] - z_[i - 1]);
    z_[0] = start + (inflow - start) * static_cast<double>(s) / substeps;
  }
}

double UpwindTransport::at(double rho) const {
  const int M = cells();
  const double pos = std::clamp(rho, 0.0, 1.0) * M;
  const int lo = std::min(static_cast<int>(std::floor(pos)), M - 1);
  const double frac = pos - lo;
  return (1.0 - frac) * z_[lo] + frac * z_[lo + 1];
}

}  // namespace kawahara::timeloop
