#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rte/medium.hpp"
#include "rte/sigma_recovery.hpp"
#include "rte_cli/config.hpp"
#include "rte_cli/report.hpp"

namespace rte::cli {

RunReport cmd_forward(const Config& cfg);
RunReport cmd_recover_sigma(const Config& cfg);
RunReport cmd_recover_k(const Config& cfg);
RunReport cmd_scaling(const Config& cfg);
RunReport cmd_diffusive(const Config& cfg);

const std::vector<std::string>& command_names();
// Dispatch by subcommand name; throws ConfigurationError for unknown names.
RunReport run_command(const std::string& name, const Config& cfg);

// Shared pieces, exposed for the tests.
PhantomSpec phantom_spec(const Config& cfg);
SolveOptions solve_options(const Config& cfg);
// Relative Gaussian noise on phi, then the components are re-extracted.
void add_noise(const Transport& t, Experiment& exp, double level, std::uint64_t seed);

// One pass of the sigma pipeline: design, solve, assemble, regularize.
struct SigmaLevel {
  int nx = 0;
  int recon_nx = 0;
  double epsilon = 0.0;
  double epsilon1 = 0.0;
  double foot_tolerance = 0.0;
  BeamDesign design;
  std::vector<Experiment> experiments;
  XRaySystem system;
  Grid recon = Grid::square(1, 1);
  Eigen::VectorXd noise;         // per-row separation noise
  DiscrepancyResult discrepancy;  // filled in discrepancy mode
  std::string lambda_mode;
  ErrorReport error;
  double residual = 0.0;         // ||R Sigma - a||
  double representation = 0.0;   // ||R sigma^dis - a||
  double combined_term = 0.0;    // eps1^{-2-delta} eps^4 + dx^2
  double smallest_singular = 0.0;
  double seconds = 0.0;
};

SigmaLevel run_sigma_level(const Config& cfg, int nx, double epsilon, int recon_nx);

// Simultaneous (dx, eps) refinement over increasing grid sizes, with eps =
// epsilon_per_dx * dx. A level equal to *reuse is not recomputed.
void sigma_refinement(const Config& cfg, RunReport& report, const std::vector<int>& levels,
                      const SigmaLevel* reuse = nullptr);

}  // namespace rte::cli
