#include "rte/diffusive.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rte/error.hpp"

namespace rte {

int slab_budget(double knudsen, const SlabOptions& opts) {
  if (opts.max_iter > 0) return opts.max_iter;
  return static_cast<int>(std::ceil(opts.budget_constant / (knudsen * knudsen)));
}

SlabSolution solve_slab(double knudsen, const std::function<double(double)>& inflow,
                        const SlabOptions& opts) {
  if (!(knudsen > 0.0)) throw ArgumentError("Knudsen number must be positive");
  if (!(opts.tol > 0.0)) throw ArgumentError("tolerance must be positive");
  SlabSolution sol(Grid::slab(opts.nx, opts.nv, opts.nodes));
  sol.knudsen = knudsen;
  sol.layer_width = 2.0 * knudsen;
  const Grid& g = sol.grid;
  const int n = g.nx();
  const int nn = n + 1;
  const int nv = g.nv();
  const double h = g.dx();
  const double c = 0.5 / knudsen;
  const int budget = slab_budget(knudsen, opts);

  std::vector<double> in(static_cast<std::size_t>(nv), 0.0);
  for (int j = 0; j < nv; ++j)
    if (g.direction(j).x > 0.0) in[static_cast<std::size_t>(j)] = inflow(g.direction(j).x);

  sol.f.assign(static_cast<std::size_t>(nv * nn), 0.0);
  sol.rho.assign(static_cast<std::size_t>(nn), 0.0);
  std::vector<double> rho_new(static_cast<std::size_t>(nn));
  auto F = [&](int i, int j) -> double& { return sol.f[static_cast<std::size_t>(j * nn + i)]; };

  for (int it = 1;; ++it) {
    std::fill(rho_new.begin(), rho_new.end(), 0.0);
    for (int j = 0; j < nv; ++j) {
      const double mu = g.direction(j).x;
      const double a = std::abs(mu) / h;
      const double w = 0.5 * g.weight(j);
      if (mu > 0.0) {
        F(0, j) = in[static_cast<std::size_t>(j)];
        for (int i = 0; i < n; ++i) {
          const double s = 0.5 * (sol.rho[static_cast<std::size_t>(i)] +
                                  sol.rho[static_cast<std::size_t>(i + 1)]);
          F(i + 1, j) = (F(i, j) * (a - c) + 2.0 * c * s) / (a + c);
        }
      } else {
        F(n, j) = 0.0;
        for (int i = n - 1; i >= 0; --i) {
          const double s = 0.5 * (sol.rho[static_cast<std::size_t>(i)] +
                                  sol.rho[static_cast<std::size_t>(i + 1)]);
          F(i, j) = (F(i + 1, j) * (a - c) + 2.0 * c * s) / (a + c);
        }
      }
      for (int i = 0; i < nn; ++i) rho_new[static_cast<std::size_t>(i)] += w * F(i, j);
    }
    double diff = 0.0;
    for (int i = 0; i < nn; ++i)
      diff = std::max(diff, std::abs(rho_new[static_cast<std::size_t>(i)] -
                                     sol.rho[static_cast<std::size_t>(i)]));
    sol.rho.swap(rho_new);
    sol.residual = diff;
    sol.iterations = it;
    if (diff <= opts.tol) break;
    if (it >= budget)
      throw ConvergenceError("slab source iteration at Kn = " + std::to_string(knudsen) +
                                 " exhausted its budget of " + std::to_string(budget) +
                                 " iterations (last change " + std::to_string(diff) + ")",
                             it, diff);
  }
  // The final sweep used the previous density; one more sweep makes f and
  // rho consistent with each other.
  for (int j = 0; j < nv; ++j) {
    const double mu = g.direction(j).x;
    const double a = std::abs(mu) / h;
    auto S = [&](int i) {
      return 0.5 * (sol.rho[static_cast<std::size_t>(i)] + sol.rho[static_cast<std::size_t>(i + 1)]);
    };
    if (mu > 0.0)
      for (int i = 0; i < n; ++i) F(i + 1, j) = (F(i, j) * (a - c) + 2.0 * c * S(i)) / (a + c);
    else
      for (int i = n - 1; i >= 0; --i) F(i, j) = (F(i + 1, j) * (a - c) + 2.0 * c * S(i)) / (a + c);
  }

  sol.current.assign(static_cast<std::size_t>(nn), 0.0);
  for (int j = 0; j < nv; ++j)
    for (int i = 0; i < nn; ++i)
      sol.current[static_cast<std::size_t>(i)] += g.weight(j) * g.direction(j).x * F(i, j);

  std::vector<double> xs, ys;
  for (int i = 0; i < nn; ++i) {
    const double x = i * h;
    if (x >= 3.0 * knudsen - 1e-12 && x <= 1.0 - 3.0 * knudsen + 1e-12) {
      xs.push_back(x);
      ys.push_back(sol.rho[static_cast<std::size_t>(i)]);
    }
  }
  if (xs.size() >= 3) {
    sol.interior = linear_fit(xs, ys);
    sol.interior_valid = true;
    sol.eta_hat = sol.interior.intercept;
    sol.theta_at_one = sol.interior.at(1.0);
  }
  return sol;
}

LayerDiagnostics layer_diagnostics(const SlabSolution& sol) {
  LayerDiagnostics d;
  if (!sol.interior_valid) {
    d.note = "interior window [3Kn, 1-3Kn] is empty: no separation between layer and interior";
    return d;
  }
  d.interior_slope = sol.interior.slope;
  d.eta_hat = sol.eta_hat;
  // Deviation from the interior line over the layer at the illuminated wall.
  const double h = sol.grid.dx();
  const double scale = std::abs(sol.eta_hat);
  std::vector<double> xs, ys;
  for (int i = 0; i * h <= 3.0 * sol.knudsen + 1e-12; ++i) {
    const double dev = std::abs(sol.rho[static_cast<std::size_t>(i)] - sol.interior.at(i * h));
    if (dev <= 1e-6 * scale) break;
    xs.push_back(i * h);
    ys.push_back(std::log(dev));
  }
  if (xs.size() < 3) {
    d.note = "layer resolved by fewer than 3 nodes";
    return d;
  }
  const LinearFit f = linear_fit(xs, ys);
  d.decay_rate = -f.slope;
  d.decay_rate_times_kn = d.decay_rate * sol.knudsen;
  d.valid = true;
  return d;
}

BreakdownResult breakdown_sweep(const std::vector<double>& knudsen, const BreakdownConfig& cfg) {
  if (knudsen.empty()) throw ArgumentError("breakdown sweep needs at least one Knudsen number");
  for (std::size_t i = 0; i < knudsen.size(); ++i) {
    if (!(knudsen[i] > 0.0)) throw ArgumentError("Knudsen numbers must be positive");
    if (i > 0 && !(knudsen[i] < knudsen[i - 1]))
      throw ArgumentError("Knudsen numbers must be strictly decreasing");
  }
  if (!(cfg.epsilon1 > 0.0)) throw ArgumentError("epsilon1 must be positive");
  const Grid grid = Grid::square(cfg.nx, cfg.nv);
  const std::size_t ns = static_cast<std::size_t>(grid.spatial_count());
  if (cfg.scattering.size() != ns) throw ArgumentError("scattering field does not match the grid");
  const ScatteringKernel kernel = ScatteringKernel::isotropic(cfg.scattering);

  // Resolve the anchor up front so argument errors surface outside the parallel loop.
  const int ordinate = grid.nearest_ordinate(cfg.direction);
  const int anchor = find_anchor(BoundaryManifold(grid, Side::Minus), cfg.anchor, ordinate);

  BreakdownResult res;
  res.rows.resize(knudsen.size());
#pragma omp parallel for schedule(dynamic)
  for (std::size_t r = 0; r < knudsen.size(); ++r) {
    BreakdownRow& row = res.rows[r];
    row.knudsen = knudsen[r];
    Transport t(Medium::diffusive(grid, std::vector<double>(ns, 0.0), kernel, row.knudsen, true));
    SourceSpec spec{anchor, cfg.epsilon, false};
    SolveOptions so{cfg.tol, static_cast<int>(std::ceil(cfg.budget_constant /
                                                         (row.knudsen * row.knudsen)))};
    try {
      const Experiment exp = run_experiment(t, spec, so);
      const MollifiedReadout m = mollified_functionals(t, exp, cfg.epsilon1);
      row.e1 = m.e1;
      row.e2 = m.e2;
      row.e3 = m.e3;
      row.iterations = exp.iterations;
      row.complete = true;
    } catch (const ConvergenceError& e) {
      row.iterations = e.iterations();
    }
  }

  std::vector<double> inv, le1, lk, le3;
  for (BreakdownRow& row : res.rows) {
    if (!row.complete) continue;
    if (row.e1 > 0.0) {
      inv.push_back(1.0 / row.knudsen);
      le1.push_back(std::log(row.e1));
    }
    if (row.e3 > 0.0) {
      lk.push_back(std::log(row.knudsen));
      le3.push_back(std::log(row.e3));
      if (lk.size() >= 2) row.q_hat = linear_fit(lk, le3).slope;
    }
    if (!res.crossover_kn && row.e3 >= row.e1) res.crossover_kn = row.knudsen;
  }
  if (inv.size() >= 2) res.e1_vs_inverse_kn = linear_fit(inv, le1);
  if (lk.size() >= 2) res.e3_vs_kn = linear_fit(lk, le3);
  return res;
}

}  // namespace rte
