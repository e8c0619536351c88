#include <cmath>
#include <random>
#include <set>

#include "rte/error.hpp"
#include "rte/k_recovery.hpp"
#include "rte_cli/commands.hpp"

namespace rte::cli {

RunReport cmd_recover_k(const Config& cfg) {
  RunReport report("recover-k", cfg);
  const int nx = cfg.integer("nx");
  const Grid g = Grid::square(nx, cfg.integer("nv"));
  const PhantomSpec ps = phantom_spec(cfg);
  const Phantom phantom(ps);
  const Transport t(phantom.build(g));
  const SolveOptions opts{cfg.real("k_tol"), cfg.integer("max_iter")};

  const int zones = cfg.integer("k_zones");
  const int order = cfg.integer("k_order");
  KParameters truth(zones, order);
  for (int z = 0; z < zones * zones; ++z) {
    truth.at(z, 0) = ps.kappa;
    for (int p = 1; p <= order; ++p)
      if (static_cast<std::size_t>(p) <= ps.anisotropy.size())
        truth.at(z, p) = ps.kappa * ps.anisotropy[static_cast<std::size_t>(p - 1)];
  }
  if (ps.anisotropy.size() > static_cast<std::size_t>(order)) report.flag("kernel-order-truncated");

  // Distinct inflow anchors drawn from the seeded stream.
  const int n_exp = cfg.integer("k_experiments");
  if (static_cast<std::size_t>(n_exp) > t.inflow().size())
    throw ConfigurationError("k_experiments: more than the inflow nodes");
  std::mt19937_64 rng(cfg.seed());
  std::vector<int> anchors;
  std::set<int> seen;
  while (anchors.size() < static_cast<std::size_t>(n_exp)) {
    const int a = static_cast<int>(rng() % t.inflow().size());
    if (seen.insert(a).second) anchors.push_back(a);
  }

  KProblem problem{g, {}, {}, opts, {}};
  const double eps = cfg.real("epsilon");
  report.timed("experiments", [&] {
    for (std::size_t i = 0; i < anchors.size(); ++i) {
      Experiment e = run_experiment(t, {anchors[i], eps, eps == 0.0}, opts);
      add_noise(t, e, cfg.real("noise_level"), cfg.seed() + i + 1);
      problem.experiments.push_back(make_k_experiment(e));
    }
  });

  if (cfg.text("k_sigma") == "recovered") {
    const double se = cfg.real("epsilon") > 0.0 ? cfg.real("epsilon") : cfg.real("epsilon_per_dx") / nx;
    const SigmaLevel L =
        report.timed("sigma", [&] { return run_sigma_level(cfg, nx, se, cfg.integer("recon_nx")); });
    const std::vector<double> rec(L.system.sigma.data(), L.system.sigma.data() + L.system.sigma.size());
    problem.sigma.resize(static_cast<std::size_t>(g.spatial_count()));
    for (int s = 0; s < g.spatial_count(); ++s)
      problem.sigma[static_cast<std::size_t>(s)] = interpolate_nodal(L.recon, rec, g.node(s));
    report.metrics()["sigma_relative_l2_error"] = L.error.relative_l2;
    report.flag("sigma-from-recovery");
  } else {
    problem.sigma = phantom.sample_sigma(g);
  }

  KParameters initial(zones, order);
  for (int z = 0; z < zones * zones; ++z) initial.at(z, 0) = cfg.real("k_initial");
  KRecoveryOptions ko;
  ko.max_iter = cfg.integer("k_max_iter");
  ko.gtol = cfg.real("k_gtol");
  ko.ftol = cfg.real("k_ftol");
  const double truth_objective = objective(truth, problem);
  const KRecoveryResult res =
      report.timed("optimize", [&] { return recover_k(problem, initial, ko); });

  const Eigen::VectorXd c = res.params.vector(), ct = truth.vector();
  const double tn = ct.norm();
  const double err = tn > 0.0 ? (c - ct).norm() / tn : c.norm();
  bool monotone = true;
  for (std::size_t i = 1; i < res.trace.size(); ++i)
    monotone = monotone && res.trace[i].objective <= res.trace[i - 1].objective;

  auto& m = report.metrics();
  m["parameters"] = res.params.size();
  m["experiments"] = n_exp;
  m["status"] = to_string(res.status);
  m["iterations"] = static_cast<int>(res.trace.size()) - 1;
  m["evaluations"] = res.evaluations;
  m["objective"] = res.objective;
  m["objective_at_truth"] = truth_objective;
  m["gradient_norm"] = res.gradient.size() ? res.gradient.norm() : 0.0;
  m["coefficient_error"] = err;
  m["coefficient_error_kind"] = tn > 0.0 ? "relative" : "absolute";
  m["objective_monotone"] = monotone;
  if (res.status == KStatus::LineSearchFailed) report.flag("line-search-failed");
  if (res.status == KStatus::MaxIterations) report.flag("max-iterations");

  report.check_at_most("coefficient_error", err, cfg.real("check_k_relative_error"));
  report.check_at_most("objective", res.objective, cfg.real("check_k_objective"));
  report.check_true("objective_monotone", monotone);

  Csv trace({"iteration", "objective", "gradient_norm", "step"});
  for (const KTraceEntry& e : res.trace) trace.row({e.iteration, e.objective, e.gradient_norm, e.step});
  report.add_csv("trace.csv", trace);
  Csv coeffs({"zone", "order", "recovered", "truth"});
  for (int z = 0; z < zones * zones; ++z)
    for (int p = 0; p <= order; ++p) coeffs.row({z, p, res.params.at(z, p), truth.at(z, p)});
  report.add_csv("coefficients.csv", coeffs);
  return report;
}

}  // namespace rte::cli
