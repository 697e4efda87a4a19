#pragma once

// Flat key=value run configuration and the subcommands of the kawahara tool.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "kawahara/error.hpp"
#include "kawahara/model.hpp"
#include "kawahara/spatial.hpp"
#include "kawahara/timeloop.hpp"

namespace kawahara::cli {

struct RunConfig {
  model::SystemParams params{1.0, 1.0, 2, 0.0, 0.0, 1.0, 1.0};

  // time stepping
  int N = 300;
  double dt = 1e-3;
  double T = 20.0;
  timeloop::Mode mode = timeloop::Mode::nonlinear;
  timeloop::Scheme scheme = timeloop::Scheme::crank_nicolson;
  timeloop::Coupling coupling = timeloop::Coupling::implicit;
  spatial::NonlinearForm nonlinear_form = spatial::NonlinearForm::advective;
  int startup_steps = 2;
  int record_stride = 1;
  std::vector<double> snapshot_times;

  // Lyapunov weights and certificate radius
  std::optional<double> mu1, mu2;
  std::optional<double> radius;

  // initial data
  std::string ic = "bump3";
  double amplitude = 1.0;
  std::string amplitude_mode = "absolute";
  std::string history = "zero";
  double history_value = 0.0;
  std::string u0_file, z0_file;

  // decay fit window (defaults 0.2 T and T)
  std::optional<double> fit_t_a, fit_t_b;

  // observability probe
  std::uint64_t seed = 1;
  int n_samples = 50;

  // spectral scan
  double scan_r_min = -2.0, scan_r_max = 2.0;
  double scan_L_min = 0.1, scan_L_max = 20.0;
  int nr = 100, nL = 100;

  // critical set
  double critical_L_min = 0.01, critical_L_max = 50.0;

  // convergence study
  std::vector<int> conv_space_N{64, 128, 256};
  double conv_space_dt = 1e-4;
  std::vector<double> conv_time_dt{4e-3, 2e-3, 1e-3};
  int conv_time_N = 512;
  double conv_T = 1.0;
  std::string conv_profile = "cubic";

  std::string out_dir = ".";

  /// Keys assigned in the parsed text, in canonical order on output.
  std::set<std::string> explicit_keys;
};

struct KeyInfo {
  std::string name;
  std::string type;
  std::string default_value;
  std::string help;
};

/// Every accepted key in canonical order.
std::vector<KeyInfo> config_keys();

/// key=value lines; '#' starts a comment; blank lines ignored. Unknown keys,
/// malformed values and repeated keys are errors (ErrorKind::config).
RunConfig parse_config(std::string_view text);

/// Explicitly set keys in canonical order, numbers at 17 significant digits.
std::string serialize_config(const RunConfig& config);

/// Throws ErrorKind::config naming the first missing key.
void require_keys(const RunConfig& config, const std::vector<std::string>& keys);

const std::vector<std::string>& subcommands();
/// Keys a subcommand cannot run without.
std::vector<std::string> required_keys(const std::string& subcommand);

/// Initial data described by the config, with amplitude scaling applied on
/// the given grid.
timeloop::InitialData build_initial_data(const RunConfig& config, const spatial::Grid& grid);

/// Runs one subcommand and writes its artifacts into `out`. Returns the list
/// of files written. Errors propagate as kawahara::Error.
std::vector<std::filesystem::path> run_subcommand(const std::string& name,
                                                  const RunConfig& config,
                                                  const std::filesystem::path& out);

/// {"error": {"kind": ..., "message": ...}}
std::string error_json(ErrorKind kind, const std::string& message);

/// Exit status for an error kind (config 2, refused 3, others 1).
int exit_code(ErrorKind kind);

}  // namespace kawahara::cli
