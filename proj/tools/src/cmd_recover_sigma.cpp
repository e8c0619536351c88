#include <chrono>
#include <cmath>
#include <numbers>
#include <sstream>

#include "rte/error.hpp"
#include "rte_cli/commands.hpp"

namespace rte::cli {

namespace {

// Distinct, reproducible noise stream per experiment.
std::uint64_t stream_seed(std::uint64_t seed, std::size_t i) {
  return seed ^ (0x9E3779B97F4A7C15ull * (static_cast<std::uint64_t>(i) + 1));
}

double auto_epsilon(const Config& cfg, int nx) {
  const double eps = cfg.real("epsilon");
  return eps > 0.0 ? eps : cfg.real("epsilon_per_dx") / nx;
}

}  // namespace

SigmaLevel run_sigma_level(const Config& cfg, int nx, double epsilon, int recon_nx) {
  const auto t0 = std::chrono::steady_clock::now();
  SigmaLevel L;
  L.nx = nx;
  L.recon_nx = recon_nx;
  L.epsilon = epsilon;
  L.epsilon1 = cfg.real("epsilon1_factor") * epsilon;
  const Grid g = Grid::square(nx, cfg.integer("nv"));
  const double dx = g.dx();
  L.foot_tolerance = cfg.real("foot_tolerance") < 0.0 ? 0.5 * epsilon - dx : cfg.real("foot_tolerance");
  if (L.foot_tolerance < 0.0)
    throw ConfigurationError("foot tolerance eps/2 - dx is negative; raise epsilon above 2 dx");

  const Phantom phantom(phantom_spec(cfg));
  const Transport t(phantom.build(g));
  L.design = design_parallel_beam(t, cfg.integer("angles"), cfg.integer("offsets"),
                                  cfg.real("offset_extent"), L.foot_tolerance);
  if (L.design.chords.empty()) throw ConfigurationError("beam design accepted no chords");

  const SolveOptions opts = solve_options(cfg);
  const double noise_level = cfg.real("noise_level");
  for (std::size_t i = 0; i < L.design.chords.size(); ++i) {
    Experiment e = run_experiment(t, {L.design.chords[i].anchor, epsilon, false}, opts);
    add_noise(t, e, noise_level, stream_seed(cfg.seed(), i));
    L.experiments.push_back(std::move(e));
  }

  L.recon = Grid::square(recon_nx, 1);
  L.system = assemble_system(t, L.experiments, L.recon);
  XRaySystem& sys = L.system;
  if (sys.used.empty()) throw ConfigurationError("every experiment had a nonpositive reading");
  sys.truth.resize(L.recon.spatial_count());
  for (int s = 0; s < L.recon.spatial_count(); ++s) sys.truth(s) = phantom.sigma(L.recon.node(s));
  L.representation = (sys.R * sys.truth - sys.a).norm();
  L.noise.resize(static_cast<Eigen::Index>(sys.used.size()));
  for (std::size_t r = 0; r < sys.used.size(); ++r)
    L.noise(static_cast<Eigen::Index>(r)) =
        separation_noise(t, L.experiments[static_cast<std::size_t>(sys.used[r])]);

  sys.delta = cfg.real("delta");
  L.lambda_mode = cfg.text("lambda_mode");
  if (L.lambda_mode == "fixed") {
    sys.lambda = cfg.real("lambda");
  } else if (L.lambda_mode == "theorem") {
    const RangeCertificate cert = range_certificate(sys.R, sys.truth);
    sys.z = cert.z;
    sys.lambda = lambda_from_theorem(epsilon, L.epsilon1, sys.delta, dx, cert.z.norm());
  } else {
    L.discrepancy = discrepancy_lambda(sys.R, sys.a, L.noise.norm(), cfg.real("discrepancy_tau"));
    sys.lambda = L.discrepancy.lambda;
  }
  tikhonov_solve(sys);
  L.error = error_report(sys.sigma, sys.truth);
  L.residual = (sys.R * sys.sigma - sys.a).norm();
  L.combined_term = std::pow(L.epsilon1, -2.0 - sys.delta) * std::pow(epsilon, 4) + dx * dx;
  L.smallest_singular = smallest_singular_value(sys.R);
  L.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return L;
}

namespace {

nlohmann::json level_json(const SigmaLevel& L) {
  nlohmann::json j;
  j["nx"] = L.nx;
  j["recon_nx"] = L.recon_nx;
  j["epsilon"] = L.epsilon;
  j["epsilon1"] = L.epsilon1;
  j["foot_tolerance"] = L.foot_tolerance;
  j["chords"] = L.design.chords.size();
  j["rejected_lines"] = L.design.rejected;
  j["rows"] = L.system.used.size();
  j["excluded_rows"] = L.system.excluded.size();
  j["unknowns"] = L.recon.spatial_count();
  j["lambda"] = L.system.lambda;
  j["lambda_mode"] = L.lambda_mode;
  j["relative_l2_error"] = L.error.relative_l2;
  j["l2_error"] = L.error.l2;
  j["max_error"] = L.error.max;
  j["residual"] = L.residual;
  j["representation_residual"] = L.representation;
  j["noise_norm"] = L.noise.norm();
  j["combined_term"] = L.combined_term;
  j["smallest_singular_value"] = L.smallest_singular;
  j["seconds"] = L.seconds;
  return j;
}

}  // namespace

void sigma_refinement(const Config& cfg, RunReport& report, const std::vector<int>& levels,
                      const SigmaLevel* reuse) {
  if (levels.size() < 2) throw ConfigurationError("refine_nx: needs at least two grids");
  for (std::size_t i = 1; i < levels.size(); ++i)
    if (levels[i] <= levels[i - 1]) throw ConfigurationError("refine_nx: must be increasing");
  Csv table({"nx", "dx", "epsilon", "epsilon1", "recon_nx", "rows", "lambda", "relative_l2_error",
             "combined_term", "residual"});
  std::vector<double> terms, errors;
  nlohmann::json rows = nlohmann::json::array();
  for (int n : levels) {
    const double eps = cfg.real("epsilon_per_dx") / n;
    const int rn = std::max(1, n / cfg.integer("recon_ratio"));
    const bool same = reuse && n == reuse->nx && eps == reuse->epsilon && rn == reuse->recon_nx;
    const SigmaLevel L = same ? *reuse : report.timed("refine-" + std::to_string(n), [&] {
      return run_sigma_level(cfg, n, eps, rn);
    });
    table.row({n, 1.0 / n, L.epsilon, L.epsilon1, L.recon_nx, static_cast<int>(L.system.used.size()),
               L.system.lambda, L.error.relative_l2, L.combined_term, L.residual});
    rows.push_back(level_json(L));
    terms.push_back(L.combined_term);
    errors.push_back(L.error.relative_l2);
  }
  report.add_csv("refinement.csv", table);
  report.metrics()["refinement"] = rows;
  bool monotone = true;
  for (std::size_t i = 1; i < errors.size(); ++i) monotone = monotone && errors[i] < errors[i - 1];
  const LinearFit f = loglog_fit(terms, errors);
  report.fit({"sigma_error_vs_combined_term", f, 0.5,
              "relative L2 error against eps1^(-2-delta) eps^4 + dx^2"});
  report.check_true("refinement_error_monotone", monotone);
  report.check_within("refinement_slope", f.slope, cfg.real("check_slope_min"),
                      cfg.real("check_slope_max"));
}

RunReport cmd_recover_sigma(const Config& cfg) {
  RunReport report("recover-sigma", cfg);
  const int nx = cfg.integer("nx");
  const SigmaLevel main = report.timed(
      "pipeline", [&] { return run_sigma_level(cfg, nx, auto_epsilon(cfg, nx), cfg.integer("recon_nx")); });
  const XRaySystem& sys = main.system;
  report.metrics()["level"] = level_json(main);
  if (main.lambda_mode == "discrepancy") {
    report.metrics()["discrepancy"] = {{"target", main.discrepancy.target},
                                       {"residual", main.discrepancy.residual},
                                       {"evaluations", main.discrepancy.evaluations},
                                       {"bracketed", main.discrepancy.bracketed}};
    if (!main.discrepancy.bracketed) report.flag("discrepancy-target-outside-bracket");
  }
  if (cfg.real("noise_level") > 0.0) report.flag("noisy-data");
  report.check_at_most("relative_l2_error", main.error.relative_l2, cfg.real("check_relative_error"));

  Csv chords({"row", "anchor", "receiver", "ordinate", "angle_index", "offset_index", "foot_offset",
              "a", "row_truth", "row_recovered", "noise"});
  const Eigen::VectorXd rt = sys.R * sys.truth, rs = sys.R * sys.sigma;
  for (std::size_t r = 0; r < sys.used.size(); ++r) {
    const DesignedChord& c = main.design.chords[static_cast<std::size_t>(sys.used[r])];
    const auto i = static_cast<Eigen::Index>(r);
    chords.row({static_cast<int>(r), c.anchor, c.receiver, c.ordinate, c.angle_index, c.offset_index,
                c.foot_offset, sys.a(i), rt(i), rs(i), main.noise(i)});
  }
  report.add_csv("chords.csv", chords);
  Csv sigma({"node", "x", "y", "truth", "recovered"});
  for (int s = 0; s < main.recon.spatial_count(); ++s)
    sigma.row({s, main.recon.node(s).x, main.recon.node(s).y, sys.truth(s), sys.sigma(s)});
  report.add_csv("sigma.csv", sigma);

  if (cfg.flag("fbp")) {
    // Each designed line runs along direction theta with offset along its
    // left normal, i.e. normal angle theta + pi/2 in the sinogram convention.
    Sinogram sino;
    sino.n_angles = cfg.integer("angles");
    sino.n_offsets = cfg.integer("offsets");
    sino.extent = cfg.real("offset_extent");
    sino.first_angle = 0.5 * std::numbers::pi;
    sino.values.assign(static_cast<std::size_t>(sino.n_angles * sino.n_offsets), 0.0);
    for (std::size_t r = 0; r < sys.used.size(); ++r) {
      const DesignedChord& c = main.design.chords[static_cast<std::size_t>(sys.used[r])];
      sino.at(c.angle_index, c.offset_index) = sys.a(static_cast<Eigen::Index>(r));
    }
    if (sys.used.size() < sino.values.size()) report.flag("fbp-sinogram-incomplete");
    const FbpResult fbp = fbp_reconstruct(sino, main.recon);
    if (fbp.few_angles) report.flag("fbp-few-angles");
    const Eigen::VectorXd img = Eigen::Map<const Eigen::VectorXd>(
        fbp.image.data(), static_cast<Eigen::Index>(fbp.image.size()));
    report.metrics()["fbp_relative_l2_error"] = error_report(img, sys.truth).relative_l2;
    std::ostringstream os;
    write_sinogram(os, sino);
    report.add_file("sinogram.txt", os.str());
  }

  if (!cfg.integers("refine_nx").empty()) sigma_refinement(cfg, report, cfg.integers("refine_nx"), &main);
  return report;
}

}  // namespace rte::cli
