#include <random>

#include "rte/error.hpp"
#include "rte_cli/commands.hpp"

namespace rte::cli {

PhantomSpec phantom_spec(const Config& cfg) {
  PhantomSpec p;
  p.kind = cfg.text("phantom");
  p.sigma0 = cfg.real("sigma0");
  p.kappa = cfg.real("kappa");
  p.amplitude = cfg.real("amplitude");
  p.width = cfg.real("width");
  p.center = {cfg.real("center_x"), cfg.real("center_y")};
  p.amplitude2 = cfg.real("amplitude2");
  p.width2 = cfg.real("width2");
  p.center2 = {cfg.real("center2_x"), cfg.real("center2_y")};
  p.anisotropy = cfg.reals("anisotropy");
  return p;
}

SolveOptions solve_options(const Config& cfg) { return {cfg.real("tol"), cfg.integer("max_iter")}; }

void add_noise(const Transport& t, Experiment& exp, double level, std::uint64_t seed) {
  if (level <= 0.0) return;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  for (double& v : exp.phi.values) v *= 1.0 + level * normal(rng);
  extract_components(t, exp);
}

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"forward", "recover-sigma", "recover-k", "scaling",
                                                 "diffusive"};
  return names;
}

RunReport run_command(const std::string& name, const Config& cfg) {
  if (name == "forward") return cmd_forward(cfg);
  if (name == "recover-sigma") return cmd_recover_sigma(cfg);
  if (name == "recover-k") return cmd_recover_k(cfg);
  if (name == "scaling") return cmd_scaling(cfg);
  if (name == "diffusive") return cmd_diffusive(cfg);
  throw ConfigurationError("unknown command '" + name + "'");
}

}  // namespace rte::cli
