#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>

#include "rte/error.hpp"
#include "rte_cli/commands.hpp"

namespace {

using namespace rte::cli;

struct Options {
  std::string config;
  std::string out = "rte-out";
  std::optional<std::uint64_t> seed;
  bool check = false;
  std::vector<std::string> overrides;
};

int fail(const std::string& command, const Options& o, int code, const std::string& status,
         const std::string& message) {
  const nlohmann::json j = error_json(command, status, message);
  std::cerr << j.dump(2) << '\n';
  try {
    std::filesystem::create_directories(o.out);
    std::ofstream(std::filesystem::path(o.out) / "report.json") << j.dump(2) << '\n';
  } catch (const std::exception&) {
    // The error already went to stderr.
  }
  return code;
}

int run(const std::string& command, const Options& o) {
  std::vector<std::string> overrides = o.overrides;
  if (o.seed) overrides.push_back("seed=" + std::to_string(*o.seed));
  std::optional<Config> cfg;
  try {
    cfg.emplace(Config::load(o.config, overrides));
  } catch (const std::exception& e) {
    return fail(command, o, kConfigError, "config-error", e.what());
  }
  try {
    RunReport report = run_command(command, *cfg);
    const bool failed = o.check && !report.checks_passed();
    const std::string status = failed ? "check-failed" : "ok";
    write_outputs(report, o.out, status);
    for (const Check& c : report.checks())
      std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << " = " << format_number(c.value) << '\n';
    for (const std::string& f : report.flags()) std::cout << "flag " << f << '\n';
    std::cout << command << ": " << status << " (" << o.out << "/report.json)\n";
    return failed ? kCheckFailed : kOk;
  } catch (const rte::ConfigurationError& e) {
    return fail(command, o, kConfigError, "config-error", e.what());
  } catch (const rte::ArgumentError& e) {
    return fail(command, o, kConfigError, "config-error", e.what());
  } catch (const rte::ConvergenceError& e) {
    return fail(command, o, kSolverFailure, "solver-failure", e.what());
  } catch (const std::exception& e) {
    return fail(command, o, kSolverFailure, "solver-failure", e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Inverse radiative transfer experiments"};
  app.require_subcommand(0, 1);
  bool list_keys = false;
  app.add_flag("--list-keys", list_keys, "Print every configuration key with its default");

  const std::map<std::string, std::string> about = {
      {"forward", "Solve one boundary experiment and split the outflow into its components"},
      {"recover-sigma", "Recover absorption from ballistic data by regularized X-ray inversion"},
      {"recover-k", "Recover scattering coefficients by adjoint-gradient fitting"},
      {"scaling", "Sweep source and readout widths; check X-ray consistency order"},
      {"diffusive", "Slab diffusion limit and ballistic breakdown as Kn shrinks"}};
  Options o;
  for (const std::string& name : command_names()) {
    CLI::App* sub = app.add_subcommand(name, about.at(name));
    sub->add_option("--config", o.config, "JSON configuration file")->required();
    sub->add_option("--out", o.out, "Output directory")->capture_default_str();
    sub->add_option("--seed", o.seed, "Override the seed key");
    sub->add_flag("--check", o.check, "Exit with 4 when a threshold check fails");
    sub->add_option("overrides", o.overrides, "key=value overrides, values parsed as JSON");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  if (list_keys) {
    for (const KeySpec& k : config_schema())
      std::cout << k.name << " = " << k.fallback.dump() << "  # " << k.help << '\n';
    return kOk;
  }
  for (const std::string& name : command_names())
    if (app.got_subcommand(name)) return run(name, o);
  std::cout << app.help();
  return kConfigError;
}
