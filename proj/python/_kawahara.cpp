#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "kawahara/cli.hpp"
#include "kawahara/diagnostics.hpp"
#include "kawahara/model.hpp"
#include "kawahara/spectral.hpp"
#include "kawahara/timeloop.hpp"

namespace py = pybind11;
using namespace kawahara;

namespace {

py::dict certificate_dict(const model::Certificate& c) {
  py::dict d;
  d["mu1"] = c.mu1;
  d["mu2"] = c.mu2;
  d["r"] = c.r;
  d["lambda"] = c.lambda;
  d["lambda_delay"] = c.lambda_delay;
  d["lambda_length"] = c.lambda_length;
  d["kappa"] = c.kappa;
  d["m_negdef"] = c.m_negdef;
  d["m_mu_negdef"] = c.m_mu_negdef;
  return d;
}

py::dict simulate_text(const std::string& text) {
  const auto config = cli::parse_config(text);
  cli::require_keys(config, cli::required_keys("simulate"));
  const auto grid = spatial::build_grid(config.params.L, config.N);
  timeloop::SimulationOptions sim;
  sim.T = config.T;
  sim.N = config.N;
  sim.dt = config.dt;
  sim.mode = config.mode;
  sim.coupling = config.coupling;
  sim.scheme = config.scheme;
  sim.nonlinear = config.nonlinear_form;
  sim.startup_steps = config.startup_steps;
  sim.record_stride = config.record_stride;
  sim.mu1 = config.mu1;
  sim.mu2 = config.mu2;
  timeloop::RunRecord run;
  {
    const auto ic = cli::build_initial_data(config, grid);
    py::gil_scoped_release release;
    run = timeloop::simulate(config.params, ic, sim);
  }
  std::vector<double> t, E, V, trace0, z1, l2;
  for (const auto& r : run.series) {
    t.push_back(r.t);
    E.push_back(r.E);
    V.push_back(r.V);
    trace0.push_back(r.trace0);
    z1.push_back(r.z1);
    l2.push_back(r.l2);
  }
  py::dict d;
  d["t"] = t;
  d["E"] = E;
  d["V"] = V;
  d["trace0"] = trace0;
  d["z1"] = z1;
  d["l2"] = l2;
  d["u_final"] = std::vector<double>(run.u_final.data(), run.u_final.data() + run.u_final.size());
  d["monotonicity_violations"] = run.monotonicity_violations;
  d["warnings"] = run.warnings;
  return d;
}

}  // namespace

PYBIND11_MODULE(_kawahara, m) {
  m.doc() = "Kawahara equation with delayed boundary feedback";

  static py::exception<Error> error_type(m, "KawaharaError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = py::handle(error_type)(std::string(to_string(e.kind())) + ": " + e.what());
      exc.attr("kind") = to_string(e.kind());
      PyErr_SetObject(error_type.ptr(), exc.ptr());
    }
  });

  py::class_<model::SystemParams>(m, "SystemParams")
      .def(py::init([](double a, double b, int p, double alpha, double beta, double h, double L) {
             return model::SystemParams{a, b, p, alpha, beta, h, L};
           }),
           py::arg("a") = 1.0, py::arg("b") = 1.0, py::arg("p") = 2, py::arg("alpha") = 0.0,
           py::arg("beta") = 0.0, py::arg("h") = 1.0, py::arg("L") = 1.0)
      .def_readwrite("a", &model::SystemParams::a)
      .def_readwrite("b", &model::SystemParams::b)
      .def_readwrite("p", &model::SystemParams::p)
      .def_readwrite("alpha", &model::SystemParams::alpha)
      .def_readwrite("beta", &model::SystemParams::beta)
      .def_readwrite("h", &model::SystemParams::h)
      .def_readwrite("L", &model::SystemParams::L);

  m.def("validate_params", [](const model::SystemParams& p) {
    const auto r = model::validate_params(p);
    py::dict d;
    d["violations"] = r.violations;
    d["length_ok"] = r.length_ok;
    d["ok"] = r.ok();
    return d;
  });
  m.def("length_bound", &model::length_bound, py::arg("a"), py::arg("b"));
  m.def("smallness_radius", &model::smallness_radius);
  m.def("gain_matrix_M", [](double alpha, double beta) {
    const auto g = model::gain_matrix_M(alpha, beta);
    return std::vector<std::vector<double>>{{g.m11, g.m12}, {g.m12, g.m22}};
  });
  m.def("default_weights", &model::default_weights);
  m.def(
      "decay_certificate",
      [](const model::SystemParams& p, double mu1, double mu2, double r) {
        return certificate_dict(model::decay_certificate(p, mu1, mu2, r));
      },
      py::arg("params"), py::arg("mu1"), py::arg("mu2"), py::arg("r") = 0.0);

  m.def("simulate", &simulate_text, py::arg("config"),
        "Run the simulate subcommand from config text and return the recorded series.");
  m.def("fit_exponential", [](const std::vector<double>& t, const std::vector<double>& E,
                              double t_a, double t_b) {
    if (t.size() != E.size()) throw Error(ErrorKind::precondition, "t and E differ in length");
    std::vector<std::pair<double, double>> s;
    for (std::size_t i = 0; i < t.size(); ++i) s.emplace_back(t[i], E[i]);
    const auto fit = diagnostics::fit_exponential(s, t_a, t_b);
    py::dict d;
    d["C"] = fit.C;
    d["gamma"] = fit.gamma;
    d["residual"] = fit.residual;
    d["samples"] = fit.samples;
    return d;
  });

  m.def("q_roots", [](double r) {
    const auto s = spectral::q_roots(r);
    return std::vector<spectral::cplx>(s.roots.begin(), s.roots.end());
  });
  m.def("three_real_roots_threshold", &spectral::three_real_roots_threshold);
  m.def("membership_residual", &spectral::membership_residual);
  m.def(
      "spectral_scan",
      [](double r_lo, double r_hi, double L_lo, double L_hi, int nr, int nL) {
        spectral::ScanResult s;
        {
          py::gil_scoped_release release;
          s = spectral::spectral_scan(r_lo, r_hi, L_lo, L_hi, nr, nL);
        }
        py::dict d;
        d["cells"] = s.cells.size();
        d["excluded"] = s.excluded;
        d["min_mobius"] = s.min_mobius;
        d["min_sigma_min"] = s.min_sigma_min;
        d["min_sigma5"] = s.min_sigma5;
        return d;
      },
      py::arg("r_lo") = -2.0, py::arg("r_hi") = 2.0, py::arg("L_lo") = 0.1,
      py::arg("L_hi") = 20.0, py::arg("nr") = 100, py::arg("nL") = 100);
  m.def("find_critical_lengths", [](double lo, double hi) {
    std::vector<double> Ls;
    for (const auto& h : spectral::find_critical_lengths(lo, hi)) Ls.push_back(h.L);
    return Ls;
  });

  m.def("parse_config",
        [](const std::string& text) { return cli::serialize_config(cli::parse_config(text)); },
        "Parse config text and return its normalized form.");
  m.def("subcommands", &cli::subcommands);
  m.def(
      "run_subcommand",
      [](const std::string& name, const std::string& text, const std::filesystem::path& out) {
        const auto config = cli::parse_config(text);
        py::gil_scoped_release release;
        return cli::run_subcommand(name, config, out);
      },
      py::arg("name"), py::arg("config"), py::arg("out"));
}
