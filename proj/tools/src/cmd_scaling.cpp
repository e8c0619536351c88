#include <cmath>
#include <numbers>

#include "rte/error.hpp"
#include "rte_cli/commands.hpp"

namespace rte::cli {

namespace {

// int_0^len cos(a + b t) dt
double cos_integral(double a, double b, double len) {
  if (std::abs(b) < 1e-12) return len * std::cos(a);
  return (std::sin(a + b * len) - std::sin(a)) / b;
}

// Exact integral of sin(pi x) sin(pi y) along {p - t v : t in [0, len]},
// via sin A sin B = (cos(A - B) - cos(A + B)) / 2.
double exact_sine_chord(Vec2 p, Vec2 v, double len) {
  const double pi = std::numbers::pi;
  const double minus = cos_integral(pi * (p.x - p.y), -pi * (v.x - v.y), len);
  const double plus = cos_integral(pi * (p.x + p.y), -pi * (v.x + v.y), len);
  return 0.5 * (minus - plus);
}

// Deterministic chords away from the corners: line i has direction angle
// 2 pi (i + 0.5) / n and offset 0.35 sin(2.3 i) from the centre.
std::vector<std::pair<Vec2, Vec2>> consistency_chords(const Grid& g, int n) {
  std::vector<std::pair<Vec2, Vec2>> out;
  for (int i = 0; i < n; ++i) {
    const double th = 2.0 * std::numbers::pi * (i + 0.5) / n;
    const Vec2 v{std::cos(th), std::sin(th)};
    const Vec2 mid = Vec2{0.5, 0.5} + Vec2{-v.y, v.x} * (0.35 * std::sin(2.3 * i));
    out.emplace_back(mid + v * exit_time(g, mid, v, Sign::Plus), v);
  }
  return out;
}

void epsilon_sweeps(const Config& cfg, RunReport& report) {
  const Grid g = Grid::square(cfg.integer("nx"), cfg.integer("nv"));
  const int ordinate = cfg.integer("anchor_ordinate");
  if (ordinate >= g.nv()) throw ConfigurationError("anchor_ordinate: must be below nv");
  const Transport t = report.timed("setup", [&] { return Transport(Phantom(phantom_spec(cfg)).build(g)); });
  const int anchor = find_anchor(t.inflow(), {cfg.real("anchor_x"), cfg.real("anchor_y")}, ordinate);
  const SolveOptions opts = solve_options(cfg);

  const std::vector<double> eps = cfg.reals("scaling_epsilons");
  if (eps.size() < 2) throw ConfigurationError("scaling_epsilons: needs at least two values");
  const double eps1 = cfg.real("scaling_epsilon1");
  Csv table({"epsilon", "epsilon1", "E1", "E2", "E3", "contamination", "iterations"});
  std::vector<double> ratio;
  std::vector<Experiment> runs;
  report.timed("epsilon-sweep", [&] {
    for (double e : eps) {
      Experiment ex = run_experiment(t, {anchor, e, false}, opts);
      const MollifiedReadout r = mollified_functionals(t, ex, eps1);
      if (r.degenerate) report.flag("degenerate-readout");
      table.row({e, eps1, r.e1, r.e2, r.e3, r.contamination(), ex.iterations});
      ratio.push_back(r.contamination());
      runs.push_back(std::move(ex));
    }
  });
  report.add_csv("epsilon_sweep.csv", table);
  const LinearFit f = loglog_fit(eps, ratio);
  // dim of the boundary measure on Gamma_- in 2D: one space and one angle.
  const double predicted = 2.0;
  report.fit({"contamination_vs_epsilon", f, predicted,
              "ln((E2+E3)/E1) against ln eps at fixed eps1; the 3D exponent is 4"});
  report.metrics()["epsilon_exponent"] = {{"measured", f.slope},
                                          {"predicted_2d", predicted},
                                          {"predicted_3d", 4.0}};
  report.check_within("epsilon_exponent", f.slope, predicted - cfg.real("check_eps_slope_tolerance"),
                      predicted + cfg.real("check_eps_slope_tolerance"));

  const std::vector<double> eps1s = cfg.reals("scaling_epsilon1s");
  if (eps1s.size() >= 2) {
    // Readout-width sweep on the first source width: no new solves needed.
    Csv t1({"epsilon", "epsilon1", "E1", "E2", "E3", "contamination"});
    std::vector<double> r1;
    for (double w : eps1s) {
      const MollifiedReadout r = mollified_functionals(t, runs.front(), w);
      t1.row({eps.front(), w, r.e1, r.e2, r.e3, r.contamination()});
      r1.push_back(r.contamination());
    }
    report.add_csv("epsilon1_sweep.csv", t1);
    report.fit({"contamination_vs_epsilon1", loglog_fit(eps1s, r1), std::nullopt,
                "ln((E2+E3)/E1) against ln eps1 at fixed eps; reported only"});
  }
}

void xray_sweep(const Config& cfg, RunReport& report) {
  const std::vector<int> sizes = cfg.integers("xray_nx");
  if (sizes.size() < 2) throw ConfigurationError("xray_nx: needs at least two grids");
  const int n = cfg.integer("xray_chords");
  Csv table({"nx", "dx", "rms_error", "max_error"});
  std::vector<double> dxs, errs;
  for (int nx : sizes) {
    const Grid g = Grid::square(nx, 1);
    Eigen::VectorXd sig(g.spatial_count());
    for (int s = 0; s < g.spatial_count(); ++s)
      sig(s) = std::sin(std::numbers::pi * g.node(s).x) * std::sin(std::numbers::pi * g.node(s).y);
    double sq = 0.0, mx = 0.0;
    for (const auto& [p, v] : consistency_chords(g, n)) {
      const Chord c = trace_chord(g, p, v, g.dx());
      const double err = xray_row(g, c).dot(sig) - exact_sine_chord(p, v, c.length);
      sq += err * err;
      mx = std::max(mx, std::abs(err));
    }
    const double rms = std::sqrt(sq / n);
    table.row({nx, g.dx(), rms, mx});
    dxs.push_back(g.dx());
    errs.push_back(rms);
  }
  report.add_csv("xray_consistency.csv", table);
  const LinearFit f = loglog_fit(dxs, errs);
  report.fit({"xray_error_vs_dx", f, 2.0, "RMS of R sigma_dis minus exact chord integrals"});
  report.check_within("xray_exponent", f.slope, 2.0 - cfg.real("check_xray_slope_tolerance"),
                      2.0 + cfg.real("check_xray_slope_tolerance"));
}

}  // namespace

RunReport cmd_scaling(const Config& cfg) {
  RunReport report("scaling", cfg);
  epsilon_sweeps(cfg, report);
  report.timed("xray-sweep", [&] { xray_sweep(cfg, report); });
  if (cfg.flag("scaling_sigma_refine")) {
    std::vector<int> levels = cfg.integers("refine_nx");
    if (levels.empty()) levels = {16, 32, 64};
    sigma_refinement(cfg, report, levels);
  }
  return report;
}

}  // namespace rte::cli
