#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>

#include "kawahara/cli.hpp"

namespace kawahara::cli {

namespace {

struct Field {
  const char* name;
  const char* type;
  const char* help;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string& text) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || ptr != end || !std::isfinite(v))
    throw Error(ErrorKind::config, "malformed number '" + text + "'");
  return v;
}

template <class Int>
Int to_integer(const std::string& text) {
  Int v = 0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || ptr != end)
    throw Error(ErrorKind::config, "malformed integer '" + text + "'");
  return v;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> items;
  std::size_t start = 0;
  while (true) {
    const auto comma = text.find(',', start);
    items.push_back(trim(std::string_view(text).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  for (const auto& item : items)
    if (item.empty()) throw Error(ErrorKind::config, "empty list element in '" + text + "'");
  return items;
}

template <class T, class F>
std::string join(const std::vector<T>& values, F fmt) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += fmt(values[i]);
  }
  return out;
}

// shortest text that reads back to the same double
std::string shortest(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string fmt_opt(const std::optional<double>& v) { return v ? shortest(*v) : ""; }

std::string one_of(const std::string& value, std::initializer_list<const char*> allowed,
                   const char* what) {
  std::string names;
  for (const char* a : allowed) {
    if (value == a) return value;
    if (!names.empty()) names += '|';
    names += a;
  }
  throw Error(ErrorKind::config, "unknown " + std::string(what) + " '" + value + "' (expected " +
                                     names + ")");
}

#define NUM(member, help)                                                             \
  Field {                                                                             \
    #member, "number", help, [](RunConfig& c, const std::string& v) { c.member = to_double(v); }, \
        [](const RunConfig& c) { return shortest(c.member); }                         \
  }
#define PARAM(member, help)                                                           \
  Field {                                                                             \
    #member, "number", help,                                                          \
        [](RunConfig& c, const std::string& v) { c.params.member = to_double(v); },   \
        [](const RunConfig& c) { return shortest(c.params.member); }                  \
  }
#define INT(member, help)                                                             \
  Field {                                                                             \
    #member, "integer", help,                                                         \
        [](RunConfig& c, const std::string& v) { c.member = to_integer<int>(v); },    \
        [](const RunConfig& c) { return std::to_string(c.member); }                   \
  }
#define OPTNUM(member, help)                                                          \
  Field {                                                                             \
    #member, "number", help, [](RunConfig& c, const std::string& v) { c.member = to_double(v); }, \
        [](const RunConfig& c) { return fmt_opt(c.member); }                          \
  }
#define STR(member, help)                                                             \
  Field {                                                                             \
    #member, "path", help, [](RunConfig& c, const std::string& v) { c.member = v; },  \
        [](const RunConfig& c) { return c.member; }                                   \
  }

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      PARAM(a, "coefficient of u_x (> 0)"),
      PARAM(b, "coefficient of u_xxx (> 0)"),
      {"p", "integer", "nonlinearity exponent, 1 or 2",
       [](RunConfig& c, const std::string& v) { c.params.p = to_integer<int>(v); },
       [](const RunConfig& c) { return std::to_string(c.params.p); }},
      PARAM(alpha, "instantaneous feedback gain"),
      PARAM(beta, "delayed feedback gain"),
      PARAM(h, "delay (> 0)"),
      PARAM(L, "interval length"),
      INT(N, "number of grid cells"),
      NUM(dt, "time step"),
      NUM(T, "final time (simulate, observability)"),
      {"mode", "linear|nonlinear", "drop or keep the u^p u_x term",
       [](RunConfig& c, const std::string& v) { c.mode = timeloop::mode_from_string(v); },
       [](const RunConfig& c) { return std::string(timeloop::to_string(c.mode)); }},
      {"scheme", "crank_nicolson|bdf2", "implicit treatment of the linear part",
       [](RunConfig& c, const std::string& v) { c.scheme = timeloop::scheme_from_string(v); },
       [](const RunConfig& c) { return std::string(timeloop::to_string(c.scheme)); }},
      {"coupling", "implicit|lagged", "treatment of the alpha feedback term",
       [](RunConfig& c, const std::string& v) { c.coupling = timeloop::coupling_from_string(v); },
       [](const RunConfig& c) { return std::string(timeloop::to_string(c.coupling)); }},
      {"nonlinear_form", "advective|conservative|skew_symmetric", "discretization of u^p u_x",
       [](RunConfig& c, const std::string& v) {
         c.nonlinear_form = spatial::nonlinear_form_from_string(v);
       },
       [](const RunConfig& c) { return std::string(spatial::to_string(c.nonlinear_form)); }},
      INT(startup_steps, "leading steps taken as two implicit-Euler half steps"),
      INT(record_stride, "record every k-th step in timeseries.csv"),
      {"snapshot_times", "number list", "times written to snapshots.csv",
       [](RunConfig& c, const std::string& v) {
         c.snapshot_times.clear();
         for (const auto& item : split_list(v)) c.snapshot_times.push_back(to_double(item));
       },
       [](const RunConfig& c) { return join(c.snapshot_times, shortest); }},
      OPTNUM(mu1, "Lyapunov weight on int x u^2 (default: half the admissible supremum)"),
      OPTNUM(mu2, "Lyapunov weight on the delay term (default: half the admissible supremum)"),
      OPTNUM(radius, "data radius r for the certificate (default: H-norm of the data; 0 in certificate)"),
      {"ic", "zero|bump3|bump2|sine2|file", "initial profile u0",
       [](RunConfig& c, const std::string& v) {
         c.ic = one_of(v, {"zero", "bump3", "bump2", "sine2", "file"}, "ic");
       },
       [](const RunConfig& c) { return c.ic; }},
      NUM(amplitude, "amplitude, interpreted through amplitude_mode"),
      {"amplitude_mode", "absolute|h_norm|radius_fraction",
       "scale u0 and z0 by amplitude, to H-norm amplitude, or to H-norm amplitude * radius",
       [](RunConfig& c, const std::string& v) {
         c.amplitude_mode = one_of(v, {"absolute", "h_norm", "radius_fraction"}, "amplitude_mode");
       },
       [](const RunConfig& c) { return c.amplitude_mode; }},
      {"history", "zero|constant|file", "initial history z0 on [-h, 0]",
       [](RunConfig& c, const std::string& v) {
         c.history = one_of(v, {"zero", "constant", "file"}, "history");
       },
       [](const RunConfig& c) { return c.history; }},
      NUM(history_value, "value of a constant history"),
      STR(u0_file, "equispaced samples of u0 on [0, L] (ic=file)"),
      STR(z0_file, "equispaced samples of z0 on [-h, 0] (history=file)"),
      OPTNUM(fit_t_a, "start of the decay fit window (default 0.2 T)"),
      OPTNUM(fit_t_b, "end of the decay fit window (default T)"),
      {"seed", "unsigned integer", "seed of the observability samples",
       [](RunConfig& c, const std::string& v) { c.seed = to_integer<std::uint64_t>(v); },
       [](const RunConfig& c) { return std::to_string(c.seed); }},
      INT(n_samples, "number of observability samples"),
      NUM(scan_r_min, "spectral scan: lower r"),
      NUM(scan_r_max, "spectral scan: upper r"),
      NUM(scan_L_min, "spectral scan: lower L"),
      NUM(scan_L_max, "spectral scan: upper L"),
      INT(nr, "spectral scan: points in r"),
      INT(nL, "spectral scan: points in L"),
      NUM(critical_L_min, "critical set: lower end of the L range (> 0)"),
      NUM(critical_L_max, "critical set: upper end of the L range (<= 200)"),
      {"conv_space_N", "integer list", "convergence: grid sizes of the spatial study",
       [](RunConfig& c, const std::string& v) {
         c.conv_space_N.clear();
         for (const auto& item : split_list(v)) c.conv_space_N.push_back(to_integer<int>(item));
       },
       [](const RunConfig& c) {
         return join(c.conv_space_N, [](int n) { return std::to_string(n); });
       }},
      NUM(conv_space_dt, "convergence: time step of the spatial study"),
      {"conv_time_dt", "number list", "convergence: time steps of the temporal study",
       [](RunConfig& c, const std::string& v) {
         c.conv_time_dt.clear();
         for (const auto& item : split_list(v)) c.conv_time_dt.push_back(to_double(item));
       },
       [](const RunConfig& c) { return join(c.conv_time_dt, shortest); }},
      INT(conv_time_N, "convergence: grid size of the temporal study"),
      NUM(conv_T, "convergence: final time"),
      {"conv_profile", "cubic|feedback", "convergence: manufactured solution",
       [](RunConfig& c, const std::string& v) {
         c.conv_profile = one_of(v, {"cubic", "feedback"}, "conv_profile");
       },
       [](const RunConfig& c) { return c.conv_profile; }},
      STR(out_dir, "output directory (overridden by --out)"),
  };
  return table;
}

#undef NUM
#undef PARAM
#undef INT
#undef OPTNUM
#undef STR

const Field* find_field(const std::string& name) {
  for (const auto& f : fields())
    if (name == f.name) return &f;
  return nullptr;
}

}  // namespace

std::vector<KeyInfo> config_keys() {
  const RunConfig defaults;
  std::vector<KeyInfo> keys;
  for (const auto& f : fields()) keys.push_back({f.name, f.type, f.get(defaults), f.help});
  return keys;
}

RunConfig parse_config(std::string_view text) {
  RunConfig config;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? nl : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    const std::string content = trim(line);
    if (content.empty()) continue;

    const std::string where = "line " + std::to_string(line_no) + ": ";
    const auto eq = content.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorKind::config, where + "expected key=value, got '" + content + "'");
    const std::string key = trim(std::string_view(content).substr(0, eq));
    const std::string value = trim(std::string_view(content).substr(eq + 1));
    const Field* field = find_field(key);
    if (!field) throw Error(ErrorKind::config, where + "unknown key '" + key + "'");
    if (config.explicit_keys.count(key))
      throw Error(ErrorKind::config, where + "key '" + key + "' given twice");
    if (value.empty() && std::string(field->type) != "path")
      throw Error(ErrorKind::config, where + "missing value for '" + key + "'");
    try {
      field->set(config, value);
    } catch (const Error& e) {
      throw Error(ErrorKind::config, where + key + ": " + e.what());
    }
    config.explicit_keys.insert(key);
  }
  return config;
}

std::string serialize_config(const RunConfig& config) {
  std::string out;
  for (const auto& f : fields())
    if (config.explicit_keys.count(f.name)) out += std::string(f.name) + "=" + f.get(config) + "\n";
  return out;
}

void require_keys(const RunConfig& config, const std::vector<std::string>& keys) {
  for (const auto& key : keys)
    if (!config.explicit_keys.count(key))
      throw Error(ErrorKind::config, "missing required key '" + key + "'");
}

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names = {"simulate",      "certificate",  "spectral-scan",
                                                 "critical-set",  "observability", "convergence"};
  return names;
}

std::vector<std::string> required_keys(const std::string& subcommand) {
  static const std::map<std::string, std::vector<std::string>> table = {
      {"simulate", {"L", "N", "dt", "T"}},
      {"certificate", {"L", "alpha", "beta"}},
      {"spectral-scan", {}},
      {"critical-set", {}},
      {"observability", {"L", "T"}},
      {"convergence", {"L"}},
  };
  const auto it = table.find(subcommand);
  if (it == table.end()) throw Error(ErrorKind::config, "unknown subcommand '" + subcommand + "'");
  return it->second;
}

}  // namespace kawahara::cli
