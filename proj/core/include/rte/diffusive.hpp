#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "rte/fit.hpp"
#include "rte/measurement.hpp"

namespace rte {

struct SlabOptions {
  int nx = 400;
  int nv = 32;
  SlabNodes nodes = SlabNodes::Gauss;
  double tol = 1e-10;
  // Iteration budget ceil(budget_constant / Kn^2) unless max_iter > 0.
  double budget_constant = 50.0;
  int max_iter = 0;
};

int slab_budget(double knudsen, const SlabOptions& opts);

// Solution of mu f_x = (<f> - f) / Kn on [0, 1] with inflow at x = 0 and
// vacuum at x = 1, <f> the average over mu in [-1, 1].
struct SlabSolution {
  explicit SlabSolution(Grid g) : grid(std::move(g)) {}

  Grid grid;
  double knudsen = 1.0;
  std::vector<double> f;        // f[j * (nx+1) + i]
  std::vector<double> rho;      // <f> per node
  std::vector<double> current;  // int mu f dmu per node
  int iterations = 0;
  double residual = 0.0;

  // Interior line rho ~ eta (1 - x) fitted on [3 Kn, 1 - 3 Kn].
  bool interior_valid = false;
  LinearFit interior;
  double eta_hat = 0.0;         // line value at x = 0
  double theta_at_one = 0.0;    // line value at x = 1
  double layer_width = 0.0;     // 2 Kn

  double value(int i, int j) const {
    return f[static_cast<std::size_t>(j * grid.axis_nodes() + i)];
  }
};

// Diamond-difference source iteration. Throws ConvergenceError when the
// budget runs out.
SlabSolution solve_slab(double knudsen, const std::function<double(double)>& inflow,
                        const SlabOptions& opts = {});

struct LayerDiagnostics {
  bool valid = false;
  std::string note;
  double decay_rate = 0.0;        // of |rho - line| near x = 0
  double decay_rate_times_kn = 0.0;
  double interior_slope = 0.0;
  double eta_hat = 0.0;
};

LayerDiagnostics layer_diagnostics(const SlabSolution& sol);

struct BreakdownConfig {
  int nx = 32;
  int nv = 32;
  // Scattering rate sigma_nu per node at Kn = 1; sigma_a = 0 so sigma = sigma_nu / Kn.
  std::vector<double> scattering;
  double epsilon = 0.0;
  double epsilon1 = 0.0;
  Vec2 anchor{0.0, 0.5};
  Vec2 direction{1.0, 0.0};
  double tol = 1e-10;
  double budget_constant = 50.0;
};

struct BreakdownRow {
  double knudsen = 0.0;
  double e1 = 0.0, e2 = 0.0, e3 = 0.0;
  int iterations = 0;
  bool complete = false;
  double q_hat = std::numeric_limits<double>::quiet_NaN();  // ln E3 vs ln Kn over rows so far
};

struct BreakdownResult {
  std::vector<BreakdownRow> rows;
  std::optional<LinearFit> e1_vs_inverse_kn;  // ln E1 against 1/Kn
  std::optional<LinearFit> e3_vs_kn;          // ln E3 against ln Kn
  std::optional<double> crossover_kn;          // largest Kn with E3 >= E1
};

// knudsen must be positive and strictly decreasing.
BreakdownResult breakdown_sweep(const std::vector<double>& knudsen, const BreakdownConfig& cfg);

}  // namespace rte
