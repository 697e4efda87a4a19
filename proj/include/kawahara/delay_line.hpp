#pragma once

// History of the left boundary trace u_xx(s, 0) over the last h time units.
// The delayed state z(t, rho) = u_xx(t - h rho, 0) solves the transport problem
//   h z_t + z_rho = 0,  z(t, 0) = u_xx(t, 0),
// which is a pure shift; a ring buffer realizes it exactly.

#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace kawahara::timeloop {

class DelayLine {
 public:
  /// Empty line of the given capacity (all samples zero) at time t0.
  DelayLine(double h, double dt, std::size_t capacity, double t0 = 0.0);

  double h() const { return h_; }
  double dt() const { return dt_; }
  double t_current() const { return t0_ + static_cast<double>(steps_) * dt_; }
  long steps() const { return steps_; }
  std::size_t capacity() const { return buffer_.size(); }
  /// h/dt when it is an integer (to 1e-9 relative), otherwise 0.
  std::size_t steps_per_delay() const { return steps_per_delay_; }

  /// k-th most recent sample; k = 0 is the newest.
  double lag(std::size_t k) const;
  /// History value `lag_steps * dt` time units before t_current, linearly
  /// interpolated; exact (no arithmetic) when lag_steps is an integer.
  double value_at_lag(double lag_steps) const;
  /// z(t_current, rho) for rho in [0, 1].
  double sample(double rho) const;
  double newest() const { return lag(0); }

  /// Appends the trace at t_current + dt and advances the clock.
  void push(double trace);
  /// Overwrites the newest sample.
  void set_newest(double trace);

  /// Quadrature nodes (rho, z) covering [0, 1] in increasing rho: the stored
  /// samples at rho_k = k dt / h, closed by an interpolated node at rho = 1
  /// when h/dt is not an integer.
  std::vector<std::pair<double, double>> profile() const;

 private:
  double h_;
  double dt_;
  double t0_;
  long steps_ = 0;
  std::size_t steps_per_delay_ = 0;
  std::size_t head_ = 0;  // index of the newest sample
  std::vector<double> buffer_;
};

/// Number of dt-steps the buffer must reach back: h/dt if integral, else
/// ceil(h/dt).
std::size_t delay_steps(double h, double dt);

/// Line at t = 0 prefilled with z0 sampled at -K dt, ..., -dt, 0 (K as in
/// delay_steps). When h/dt is not an integer, -K dt lies before -h and z0 is
/// evaluated there too. Requires h > 0 and 0 < dt <= h.
DelayLine init_delay_line(const std::function<double(double)>& z0, double h, double dt);

/// alpha * current_trace + beta * z(t, 1).
double feedback_value(const DelayLine& line, double alpha, double beta,
                      double current_trace);

/// First-order upwind discretization of h z_t + z_rho = 0 on uniform rho
/// cells. Exists only to cross-check the ring buffer.
class UpwindTransport {
 public:
  UpwindTransport(double h, int cells, const std::function<double(double)>& z_initial);

  /// Advances by dt with inflow value z(t + dt, 0) = inflow (substepping to
  /// keep the Courant number <= 1).
  void advance(double dt, double inflow);
  double outflow() const { return z_.back(); }
  double at(double rho) const;
  int cells() const { return static_cast<int>(z_.size()) - 1; }

 private:
  double h_;
  std::vector<double> z_;
};

}  // namespace kawahara::timeloop
