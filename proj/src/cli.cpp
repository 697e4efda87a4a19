#include "kawahara/cli.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "kawahara/convergence.hpp"
#include "kawahara/diagnostics.hpp"
#include "kawahara/io.hpp"
#include "kawahara/spectral.hpp"

namespace kawahara::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

std::vector<double> read_samples(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorKind::io, "cannot read sample file '" + path + "'");
  std::vector<double> values;
  std::string line;
  while (std::getline(f, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    for (char& ch : line)
      if (ch == ',' || ch == ';' || ch == '\t') ch = ' ';
    std::istringstream in(line);
    std::string token;
    while (in >> token) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(token, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != token.size() || !std::isfinite(v))
        throw Error(ErrorKind::io, "malformed sample '" + token + "' in '" + path + "'");
      values.push_back(v);
    }
  }
  if (values.size() < 2)
    throw Error(ErrorKind::io, "sample file '" + path + "' needs at least two values");
  return values;
}

json params_json(const model::SystemParams& p) {
  return {{"a", p.a}, {"b", p.b}, {"p", p.p}, {"alpha", p.alpha},
          {"beta", p.beta}, {"h", p.h}, {"L", p.L}};
}

json matrix_json(const model::GainMatrix& m) {
  return {{"m11", m.m11}, {"m12", m.m12}, {"m22", m.m22}, {"det", m.det()},
          {"negative_definite", model::is_negative_definite(m)}};
}

json certificate_json(const model::Certificate& c) {
  return {{"mu1", c.mu1},
          {"mu2", c.mu2},
          {"r", c.r},
          {"lambda", c.lambda},
          {"lambda_delay", c.lambda_delay},
          {"lambda_length", c.lambda_length},
          {"kappa", c.kappa},
          {"M_negative_definite", c.m_negdef},
          {"M_mu_negative_definite", c.m_mu_negdef}};
}

void require_valid(const model::SystemParams& params) {
  const auto report = model::validate_params(params);
  if (report.ok()) return;
  std::string list;
  for (const auto& v : report.violations) list += (list.empty() ? "" : ", ") + v;
  throw Error(ErrorKind::precondition, "parameter constraints violated: " + list);
}

std::pair<double, double> weights_for(const RunConfig& config) {
  if (config.mu1 && config.mu2) return {*config.mu1, *config.mu2};
  const auto d = model::default_weights(config.params);
  return {config.mu1.value_or(d.first), config.mu2.value_or(d.second)};
}

bool certificate_possible(const model::SystemParams& params) {
  return params.beta != 0.0 && model::validate_params(params).length_ok;
}

std::vector<fs::path> cmd_simulate(const RunConfig& config, const fs::path& out) {
  require_valid(config.params);
  const auto grid = spatial::build_grid(config.params.L, config.N);
  const auto ic = build_initial_data(config, grid);

  timeloop::SimulationOptions sim;
  sim.T = config.T;
  sim.N = config.N;
  sim.dt = config.dt;
  sim.mode = config.mode;
  sim.coupling = config.coupling;
  sim.scheme = config.scheme;
  sim.nonlinear = config.nonlinear_form;
  sim.startup_steps = config.startup_steps;
  sim.snapshot_times = config.snapshot_times;
  sim.record_stride = config.record_stride;
  const bool lyap = certificate_possible(config.params) || (config.mu1 && config.mu2);
  if (lyap) {
    const auto [mu1, mu2] = weights_for(config);
    sim.mu1 = mu1;
    sim.mu2 = mu2;
  }
  const auto run = timeloop::simulate(config.params, ic, sim);

  io::CsvWriter series("kawahara-timeseries v1", {"t", "E", "V", "trace0", "z1", "l2"});
  for (const auto& r : run.series) series.row({r.t, r.E, r.V, r.trace0, r.z1, r.l2});
  io::CsvWriter snaps("kawahara-snapshots v1", {"t", "x", "u"});
  for (const auto& s : run.snapshots) {
    snaps.row({s.t, 0.0, 0.0});
    for (int j = 1; j < grid.N; ++j) snaps.row({s.t, grid.x(j), s.u[j - 1]});
    snaps.row({s.t, grid.L, 0.0});
  }

  json summary;
  summary["schema"] = "kawahara-summary v1";
  summary["params"] = params_json(config.params);
  summary["run"] = {{"N", config.N},
                    {"dt", config.dt},
                    {"T", config.T},
                    {"steps", run.series.empty() ? 0.0 : std::round(run.series.back().t / config.dt)},
                    {"mode", timeloop::to_string(config.mode)},
                    {"scheme", timeloop::to_string(config.scheme)},
                    {"coupling", timeloop::to_string(config.coupling)},
                    {"nonlinear_form", spatial::to_string(config.nonlinear_form)},
                    {"startup_steps", config.startup_steps}};
  const double E0 = run.series.front().E;
  summary["energy"] = {{"E0", E0},
                       {"E_final", run.series.back().E},
                       {"u0_norm_sq", run.u0_norm_sq},
                       {"z0_norm_sq", run.z0_norm_sq},
                       {"monotonicity_violations", run.monotonicity_violations}};
  if (run.has_lyapunov) {
    std::size_t sandwich_failures = 0;
    for (const auto& r : run.series)
      if (!diagnostics::sandwich_check(r.E, r.V, config.params, run.mu1, run.mu2).ok)
        ++sandwich_failures;
    summary["lyapunov"] = {{"mu1", run.mu1}, {"mu2", run.mu2},
                           {"sandwich_failures", sandwich_failures}};
  } else {
    summary["lyapunov"] = nullptr;
  }

  const double t_a = config.fit_t_a.value_or(0.2 * config.T);
  const double t_b = config.fit_t_b.value_or(config.T);
  std::optional<diagnostics::DecayFit> fit;
  try {
    fit = diagnostics::fit_exponential(run.series, t_a, t_b);
    summary["fit"] = {{"t_a", fit->t_a},         {"t_b", fit->t_b},
                      {"C", fit->C},             {"gamma", fit->gamma},
                      {"residual", fit->residual}, {"samples", fit->samples}};
  } catch (const Error& e) {
    summary["fit"] = {{"t_a", t_a}, {"t_b", t_b}, {"error", e.what()}};
  }

  json cert;
  if (certificate_possible(config.params)) {
    const auto [mu1, mu2] = weights_for(config);
    const double r = config.mode == timeloop::Mode::linear
                         ? 0.0
                         : config.radius.value_or(std::sqrt(std::max(E0, 0.0)));
    try {
      const auto c = model::decay_certificate(config.params, mu1, mu2, r);
      cert = certificate_json(c);
      cert["status"] = "ok";
      if (fit) {
        cert["two_lambda"] = 2.0 * c.lambda;
        cert["gamma_over_two_lambda"] = fit->gamma / (2.0 * c.lambda);
        cert["fit_meets_certificate"] = fit->gamma >= 2.0 * c.lambda;
      }
    } catch (const Error& e) {
      cert = {{"status", "refused"}, {"mu1", mu1}, {"mu2", mu2}, {"r", r}, {"reason", e.what()}};
    }
  } else {
    cert = {{"status", "refused"},
            {"reason", config.params.beta == 0.0 ? "beta = 0" : "L >= sqrt(3b/a) pi"}};
  }
  summary["certificate"] = cert;
  summary["warnings"] = run.warnings;

  const fs::path ts = out / "timeseries.csv", sn = out / "snapshots.csv", sm = out / "summary.json";
  io::write_text(ts, series.str());
  io::write_text(sn, snaps.str());
  io::write_text(sm, io::dump_json(summary));
  return {ts, sn, sm};
}

std::vector<fs::path> cmd_certificate(const RunConfig& config, const fs::path& out) {
  const auto& p = config.params;
  const auto report = model::validate_params(p);
  const auto bounds = model::mu_bounds(p.alpha, p.beta, p.L);
  const auto [mu1, mu2] = weights_for(config);
  const auto c = model::decay_certificate(p, mu1, mu2, config.radius.value_or(0.0));

  json j;
  j["schema"] = "kawahara-certificate v1";
  j["params"] = params_json(p);
  j["length_bound"] = model::length_bound(p.a, p.b);
  j["length_ok"] = report.length_ok;
  j["smallness_radius"] = model::smallness_radius(p);
  j["M"] = matrix_json(model::gain_matrix_M(p.alpha, p.beta));
  j["Mstar"] = matrix_json(model::gain_matrix_Mstar(p.alpha, p.beta));
  j["M_mu"] = matrix_json(model::perturbed_matrix(p.alpha, p.beta, p.L, mu1, mu2));
  j["mu2_sup"] = bounds.mu2_sup;
  j["mu1_sup"] = bounds.mu1_sup(mu2);
  j["certificate"] = certificate_json(c);

  const fs::path path = out / "certificate.json";
  io::write_text(path, io::dump_json(j));
  return {path};
}

std::vector<fs::path> cmd_scan(const RunConfig& config, const fs::path& out) {
  const auto scan = spectral::spectral_scan(config.scan_r_min, config.scan_r_max,
                                            config.scan_L_min, config.scan_L_max, config.nr,
                                            config.nL);
  io::CsvWriter csv("kawahara-scan v1", {"r", "L", "mobius_res", "sigma_min", "sigma5", "flags"});
  for (const auto& c : scan.cells)
    csv.row(std::vector<std::string>{io::format_double(c.r), io::format_double(c.L),
                                     io::format_double(c.mobius), io::format_double(c.sigma_min),
                                     io::format_double(c.sigma5), std::to_string(c.flags)});
  json j;
  j["schema"] = "kawahara-scan-summary v1";
  j["r_range"] = {config.scan_r_min, config.scan_r_max};
  j["L_range"] = {config.scan_L_min, config.scan_L_max};
  j["nr"] = scan.nr;
  j["nL"] = scan.nL;
  j["cells"] = scan.cells.size();
  j["excluded"] = scan.excluded;
  j["min_mobius"] = scan.min_mobius;
  j["min_sigma_min"] = scan.min_sigma_min;
  j["min_sigma5"] = scan.min_sigma5;

  const fs::path a = out / "scan.csv", b = out / "scan_summary.json";
  io::write_text(a, csv.str());
  io::write_text(b, io::dump_json(j));
  return {a, b};
}

std::vector<fs::path> cmd_critical(const RunConfig& config, const fs::path& out) {
  const auto hits = spectral::find_critical_lengths(config.critical_L_min, config.critical_L_max);
  json list = json::array();
  for (const auto& h : hits) {
    const auto& c = h.constants;
    list.push_back({{"L", h.L},
                    {"membership_residual", h.membership_residual},
                    {"max_abs_u", h.max_abs_u},
                    {"max_abs_C", h.max_abs_C},
                    {"ode_residual", h.ode_residual},
                    {"bc_residuals", h.bc_residuals},
                    {"constants",
                     {{"a", c.a}, {"b", c.b}, {"A", c.A}, {"B", c.B}, {"C1", c.C1},
                      {"C2", c.C2}, {"C3", c.C3}, {"C4", c.C4}, {"C5", c.C5}}}});
  }
  json j;
  j["schema"] = "kawahara-critical-set v1";
  j["L_range"] = {config.critical_L_min, config.critical_L_max};
  j["count"] = hits.size();
  j["hits"] = list;
  const fs::path path = out / "hits.json";
  io::write_text(path, io::dump_json(j));
  return {path};
}

std::vector<fs::path> cmd_observability(const RunConfig& config, const fs::path& out) {
  require_valid(config.params);
  diagnostics::ObservabilityOptions opt;
  opt.N = config.N;
  opt.dt = config.dt;
  opt.scheme = config.scheme;
  const auto res =
      diagnostics::observability_estimate(config.params, config.T, config.n_samples, config.seed, opt);
  json samples = json::array();
  for (const auto& s : res.samples)
    samples.push_back({{"ratio", s.ratio},
                       {"energy_ratio", s.energy_ratio},
                       {"suspected_failure", s.suspected_failure}});
  json j;
  j["schema"] = "kawahara-observability v1";
  j["params"] = params_json(config.params);
  j["T"] = config.T;
  j["N"] = config.N;
  j["dt"] = config.dt;
  j["scheme"] = timeloop::to_string(config.scheme);
  j["seed"] = config.seed;
  j["n_samples"] = config.n_samples;
  j["C_emp"] = res.C_emp;
  j["gamma_emp"] = res.gamma_emp;
  j["nu_emp"] = res.nu_emp;
  j["suspected_failures"] = res.suspected_failures;
  j["decay_consistent"] = res.decay_consistent;
  j["samples"] = samples;
  const fs::path path = out / "observability.json";
  io::write_text(path, io::dump_json(j));
  return {path};
}

std::vector<fs::path> cmd_convergence(const RunConfig& config, const fs::path& out) {
  require_valid(config.params);
  auto m = config.conv_profile == "feedback" ? verification::feedback_bump(config.params)
                                             : verification::cubic_bump(config.params);
  m.nonlinear = config.mode == timeloop::Mode::nonlinear;
  verification::ConvergenceOptions opt;
  opt.T = config.conv_T;
  opt.space_N = config.conv_space_N;
  opt.space_dt = config.conv_space_dt;
  opt.time_dt = config.conv_time_dt;
  opt.time_N = config.conv_time_N;
  opt.scheme = config.scheme;
  const auto rep = verification::convergence_study(m, opt);
  json j;
  j["schema"] = "kawahara-orders v1";
  j["params"] = params_json(config.params);
  j["profile"] = config.conv_profile;
  j["mode"] = timeloop::to_string(config.mode);
  j["scheme"] = timeloop::to_string(config.scheme);
  j["T"] = opt.T;
  j["space"] = {{"N", opt.space_N},
                {"dt", opt.space_dt},
                {"errors", rep.space_errors},
                {"orders", rep.space_orders}};
  j["time"] = {{"N", opt.time_N},
               {"dt", opt.time_dt},
               {"differences", rep.time_differences},
               {"orders", rep.time_orders}};
  const fs::path path = out / "orders.json";
  io::write_text(path, io::dump_json(j));
  return {path};
}

}  // namespace

timeloop::InitialData build_initial_data(const RunConfig& config, const spatial::Grid& grid) {
  constexpr double pi = std::numbers::pi;
  const double L = config.params.L, h = config.params.h;
  timeloop::Profile u;
  if (config.ic == "zero") {
    u = [](double) { return 0.0; };
  } else if (config.ic == "bump3") {
    u = [L](double x) { return std::pow(x * (L - x), 3); };
  } else if (config.ic == "bump2") {
    u = [L](double x) { return std::pow(x * (L - x), 2); };
  } else if (config.ic == "sine2") {
    u = [L](double x) { return std::pow(std::sin(pi * x / L), 2); };
  } else if (config.ic == "file") {
    if (config.u0_file.empty()) throw Error(ErrorKind::config, "ic=file needs u0_file");
    u = timeloop::InitialData::from_samples(read_samples(config.u0_file), L, {0.0, 0.0}, h).u0;
  } else {
    throw Error(ErrorKind::config, "unknown ic '" + config.ic + "'");
  }

  timeloop::Profile z;
  if (config.history == "zero") {
    z = [](double) { return 0.0; };
  } else if (config.history == "constant") {
    z = [v = config.history_value](double) { return v; };
  } else if (config.history == "file") {
    if (config.z0_file.empty()) throw Error(ErrorKind::config, "history=file needs z0_file");
    z = timeloop::InitialData::from_samples({0.0, 0.0}, L, read_samples(config.z0_file), h).z0;
  } else {
    throw Error(ErrorKind::config, "unknown history '" + config.history + "'");
  }

  double scale = config.amplitude;
  if (config.amplitude_mode != "absolute") {
    double target = config.amplitude;
    if (config.amplitude_mode == "radius_fraction") target *= model::smallness_radius(config.params);
    const auto line = timeloop::init_delay_line(z, h, config.dt);
    const double norm_sq =
        diagnostics::energy(spatial::sample_interior(grid, u), line, grid, config.params);
    if (!(norm_sq > 0.0)) {
      if (target != 0.0)
        throw Error(ErrorKind::precondition, "cannot scale zero initial data to a nonzero norm");
      scale = 0.0;
    } else {
      scale = target / std::sqrt(norm_sq);
    }
  }
  return {[u, scale](double x) { return scale * u(x); },
          [z, scale](double s) { return scale * z(s); }};
}

std::vector<fs::path> run_subcommand(const std::string& name, const RunConfig& config,
                                     const fs::path& out) {
  require_keys(config, required_keys(name));
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw Error(ErrorKind::io, "cannot create output directory " + out.string());
  if (name == "simulate") return cmd_simulate(config, out);
  if (name == "certificate") return cmd_certificate(config, out);
  if (name == "spectral-scan") return cmd_scan(config, out);
  if (name == "critical-set") return cmd_critical(config, out);
  if (name == "observability") return cmd_observability(config, out);
  return cmd_convergence(config, out);
}

std::string error_json(ErrorKind kind, const std::string& message) {
  json j;
  j["error"] = {{"kind", to_string(kind)}, {"message", message}};
  return io::dump_json(j);
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::config:
      return 2;
    case ErrorKind::refused:
      return 3;
    default:
      return 1;
  }
}

}  // namespace kawahara::cli
