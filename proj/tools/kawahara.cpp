// kawahara <subcommand> --config <path> [--out <dir>] [--seed <u64>]

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "kawahara/cli.hpp"
#include "kawahara/io.hpp"

namespace {

std::string key_table() {
  std::string text = "\nConfiguration keys (key=value, '#' comments):\n";
  for (const auto& k : kawahara::cli::config_keys()) {
    std::string line = "  " + k.name + " <" + k.type + ">";
    line.resize(std::max<std::size_t>(line.size() + 2, 36), ' ');
    line += k.help;
    line += k.default_value.empty() ? " [unset]" : " [" + k.default_value + "]";
    text += line + "\n";
  }
  text += "\nRequired keys:\n";
  for (const auto& s : kawahara::cli::subcommands()) {
    std::string keys;
    for (const auto& k : kawahara::cli::required_keys(s)) keys += " " + k;
    text += "  " + s + ":" + (keys.empty() ? " none" : keys) + "\n";
  }
  return text;
}

int fail(kawahara::ErrorKind kind, const std::string& message,
         const std::filesystem::path& out_dir) {
  const std::string text = kawahara::cli::error_json(kind, message);
  std::cerr << text;
  if (!out_dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (!ec) {
      try {
        kawahara::io::write_text(out_dir / "error.json", text);
      } catch (const kawahara::Error&) {
      }
    }
  }
  return kawahara::cli::exit_code(kind);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kawahara equation with delayed boundary feedback: simulation and analysis"};
  app.footer(key_table());
  app.require_subcommand(1, 1);

  std::string config_path, out_dir;
  std::uint64_t seed = 0;
  for (const auto& name : kawahara::cli::subcommands()) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "key=value configuration file")->required();
    sub->add_option("--out", out_dir, "output directory (default: out_dir key, else .)");
    sub->add_option("--seed", seed, "overrides the seed key");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  const std::string name = app.get_subcommands().front()->get_name();
  const bool seed_given = app.get_subcommands().front()->count("--seed") > 0;

  std::filesystem::path out = out_dir;
  try {
    std::ifstream f(config_path);
    if (!f) throw kawahara::Error(kawahara::ErrorKind::io, "cannot read config '" + config_path + "'");
    std::stringstream buffer;
    buffer << f.rdbuf();
    auto config = kawahara::cli::parse_config(buffer.str());
    if (out.empty()) out = config.out_dir;
    if (seed_given) {
      config.seed = seed;
      config.explicit_keys.insert("seed");
    }
    for (const auto& path : kawahara::cli::run_subcommand(name, config, out))
      std::cout << path.string() << "\n";
  } catch (const kawahara::Error& e) {
    return fail(e.kind(), e.what(), out);
  } catch (const std::exception& e) {
    return fail(kawahara::ErrorKind::solver, e.what(), out);
  }
  return 0;
}
