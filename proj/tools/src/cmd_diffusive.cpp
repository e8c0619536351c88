#include <algorithm>
#include <cmath>

#include "rte/diffusive.hpp"
#include "rte/error.hpp"
#include "rte_cli/commands.hpp"

namespace rte::cli {

namespace {

void slab_study(const Config& cfg, RunReport& report) {
  SlabOptions so;
  so.nx = cfg.integer("slab_nx");
  so.nv = cfg.integer("slab_nv");
  so.tol = cfg.real("tol");
  so.budget_constant = cfg.real("budget_constant");
  const double kn = cfg.real("slab_kn");
  const SlabSolution sol =
      report.timed("slab", [&] { return solve_slab(kn, [](double) { return 1.0; }, so); });
  const LayerDiagnostics layer = layer_diagnostics(sol);

  const auto& cur = sol.current;
  const auto [lo, hi] = std::minmax_element(cur.begin(), cur.end());
  double rho_min = *std::min_element(sol.rho.begin(), sol.rho.end());

  auto& m = report.metrics()["slab"];
  m["knudsen"] = kn;
  m["iterations"] = sol.iterations;
  m["budget"] = slab_budget(kn, so);
  m["residual"] = sol.residual;
  m["current_spread"] = *hi - *lo;
  m["rho_min"] = rho_min;
  m["interior_valid"] = sol.interior_valid;
  m["layer_width"] = sol.layer_width;
  if (sol.interior_valid) {
    const double ratio = std::abs(sol.theta_at_one) / sol.eta_hat;
    m["interior_r2"] = sol.interior.r2;
    m["interior_slope"] = sol.interior.slope;
    m["eta_hat"] = sol.eta_hat;
    m["theta_at_one"] = sol.theta_at_one;
    m["theta_ratio"] = ratio;
    report.check_at_least("slab_interior_r2", sol.interior.r2, cfg.real("check_slab_r2"));
    report.check_at_most("slab_theta_ratio", ratio, cfg.real("check_slab_theta"));
  } else {
    report.flag("slab-interior-window-empty");
  }
  m["layer"] = {{"valid", layer.valid}, {"note", layer.note},
                {"decay_rate", layer.decay_rate}, {"decay_rate_times_kn", layer.decay_rate_times_kn}};
  if (!layer.valid) report.flag("layer-diagnostic-skipped");

  Csv table({"x", "rho", "current", "interior_line"});
  for (int i = 0; i < sol.grid.axis_nodes(); ++i) {
    const double x = sol.grid.node(i).x;
    const auto k = static_cast<std::size_t>(i);
    table.row({x, sol.rho[k], cur[k], sol.interior_valid ? sol.interior.at(x) : 0.0});
  }
  report.add_csv("slab.csv", table);
}

void breakdown_study(const Config& cfg, RunReport& report) {
  const std::vector<double> kn = cfg.reals("kn_list");
  for (std::size_t i = 1; i < kn.size(); ++i)
    if (!(kn[i] < kn[i - 1])) throw ConfigurationError("kn_list: must be strictly decreasing");
  BreakdownConfig bc;
  bc.nx = cfg.integer("breakdown_nx");
  bc.nv = cfg.integer("breakdown_nv");
  const Grid g = Grid::square(bc.nx, bc.nv);
  const Phantom phantom(phantom_spec(cfg));
  bc.scattering.resize(static_cast<std::size_t>(g.spatial_count()));
  for (int s = 0; s < g.spatial_count(); ++s)
    bc.scattering[static_cast<std::size_t>(s)] = phantom.kappa(g.node(s));
  bc.epsilon = cfg.real("breakdown_epsilon") < 0.0 ? 2.0 * g.dx() : cfg.real("breakdown_epsilon");
  bc.epsilon1 = cfg.real("breakdown_epsilon1") < 0.0 ? 2.0 * g.dx() : cfg.real("breakdown_epsilon1");
  bc.tol = cfg.real("tol");
  bc.budget_constant = cfg.real("budget_constant");
  const BreakdownResult res = report.timed("breakdown", [&] { return breakdown_sweep(kn, bc); });

  Csv table({"knudsen", "E1", "E2", "E3", "E3_over_E1", "contamination", "iterations", "complete",
             "q_hat"});
  std::vector<double> e31;
  bool incomplete = false;
  for (const BreakdownRow& r : res.rows) {
    table.row({r.knudsen, r.e1, r.e2, r.e3, r.e3 / r.e1, (r.e2 + r.e3) / r.e1, r.iterations,
               r.complete, r.q_hat});
    if (r.complete)
      e31.push_back(r.e3 / r.e1);
    else
      incomplete = true;
  }
  report.add_csv("breakdown.csv", table);
  if (incomplete) report.flag("breakdown-incomplete-rows");

  auto& m = report.metrics()["breakdown"];
  m["epsilon"] = bc.epsilon;
  m["epsilon1"] = bc.epsilon1;
  m["crossover_kn"] = res.crossover_kn ? nlohmann::json(*res.crossover_kn) : nlohmann::json(nullptr);
  if (!res.crossover_kn) report.flag("no-crossover-in-sweep");
  if (res.e1_vs_inverse_kn) {
    const LinearFit& f = *res.e1_vs_inverse_kn;
    report.fit({"ln_E1_vs_inverse_kn", f, std::nullopt, "expected linear with negative slope"});
    report.check_at_least("breakdown_e1_r2", f.r2, cfg.real("check_breakdown_r2"));
    report.check_true("breakdown_e1_slope_negative", f.slope < 0.0);
  } else {
    report.check_true("breakdown_e1_fit_available", false);
  }
  if (res.e3_vs_kn)
    report.fit({"ln_E3_vs_ln_kn", *res.e3_vs_kn, std::nullopt, "fitted q; reported only"});
  bool increasing = e31.size() >= 2;
  for (std::size_t i = 1; i < e31.size(); ++i) increasing = increasing && e31[i] > e31[i - 1];
  report.check_true("breakdown_e3_over_e1_increasing", increasing);
  const BreakdownRow& first = res.rows.front();
  if (first.complete)
    report.check_at_most("kinetic_contamination", (first.e2 + first.e3) / first.e1,
                         cfg.real("check_kinetic_contamination"));
}

}  // namespace

RunReport cmd_diffusive(const Config& cfg) {
  RunReport report("diffusive", cfg);
  slab_study(cfg, report);
  if (!cfg.reals("kn_list").empty()) breakdown_study(cfg, report);
  return report;
}

}  // namespace rte::cli
