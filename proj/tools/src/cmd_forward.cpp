#include <algorithm>
#include <cmath>

#include "rte/error.hpp"
#include "rte_cli/commands.hpp"

namespace rte::cli {

RunReport cmd_forward(const Config& cfg) {
  RunReport report("forward", cfg);
  const Grid g = Grid::square(cfg.integer("nx"), cfg.integer("nv"));
  const int ordinate = cfg.integer("anchor_ordinate");
  if (ordinate >= g.nv()) throw ConfigurationError("anchor_ordinate: must be below nv");
  const SolveOptions opts = solve_options(cfg);
  const Phantom phantom(phantom_spec(cfg));
  const Transport t = report.timed("setup", [&] { return Transport(phantom.build(g)); });

  const int anchor = find_anchor(t.inflow(), {cfg.real("anchor_x"), cfg.real("anchor_y")}, ordinate);
  const double eps = cfg.real("epsilon");
  const SourceSpec spec{anchor, eps, eps == 0.0};
  Experiment exp = report.timed("solve", [&] { return run_experiment(t, spec, opts); });
  const BoundaryManifold& out = t.outflow();
  double split = 0.0;
  for (std::size_t b = 0; b < out.size(); ++b)
    split = std::max(split, std::abs(exp.phi[b] - exp.phi1[b] - exp.phi2[b] - exp.phi3[b]));
  add_noise(t, exp, cfg.real("noise_level"), cfg.seed());
  const MollifiedReadout readout = mollified_functionals(t, exp, cfg.real("epsilon1"));
  int nonzero = 0, scatter_nodes = 0;
  for (std::size_t b = 0; b < out.size(); ++b) {
    if (exp.phi[b] != 0.0) ++nonzero;
    scatter_nodes += exp.scatter_mask[b];
  }

  auto& m = report.metrics();
  m["iterations"] = exp.iterations;
  m["residual"] = exp.residual;
  m["anchor"] = {t.inflow()[static_cast<std::size_t>(anchor)].x.x,
                 t.inflow()[static_cast<std::size_t>(anchor)].x.y};
  m["counterpart"] = {exp.counterpart.x, exp.counterpart.y};
  m["snap_distance"] = exp.snap_distance;
  m["reading"] = exp.reading();
  m["ballistic_reading"] = exp.ballistic_reading();
  m["decomposition_residual"] = split;
  m["nonzero_outflow_nodes"] = nonzero;
  m["scatter_manifold_nodes"] = scatter_nodes;
  m["E1"] = readout.e1;
  m["E2"] = readout.e2;
  m["E3"] = readout.e3;
  m["contamination"] = readout.e1 > 0.0 ? readout.contamination() : 0.0;
  if (t.medium().kernel().is_zero()) report.flag("ballistic-only");
  if (readout.degenerate) report.flag("degenerate-readout");
  if (cfg.real("noise_level") > 0.0) report.flag("noisy-data");
  report.check_at_most("decomposition_residual", split, 10.0 * opts.tol);

  Csv csv({"node", "x", "y", "ordinate", "phi", "phi1", "phi2", "phi3", "r1", "r2", "r3",
           "scatter_manifold"});
  for (std::size_t b = 0; b < out.size(); ++b)
    csv.row({static_cast<int>(b), out[b].x.x, out[b].x.y, out[b].ordinate, exp.phi[b], exp.phi1[b],
             exp.phi2[b], exp.phi3[b], exp.r1[b], exp.r2[b], exp.r3[b],
             static_cast<int>(exp.scatter_mask[b])});
  report.add_csv("outflow.csv", csv);

  if (cfg.flag("dump_fields")) {
    const Decomposition d =
        report.timed("dump", [&] { return decompose_neumann(t, exp.f_minus, opts); });
    Csv fields({"node", "ordinate", "x", "y", "f", "f1", "f2", "f3"});
    for (int j = 0; j < g.nv(); ++j)
      for (int s = 0; s < g.spatial_count(); ++s)
        fields.row({s, j, g.node(s).x, g.node(s).y, d.f(s, j), d.f1(s, j), d.f2(s, j), d.f3(s, j)});
    report.add_csv("fields.csv", fields);
  }
  return report;
}

}  // namespace rte::cli
