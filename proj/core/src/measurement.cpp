#include "rte/measurement.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "rte/error.hpp"

namespace rte {

int find_anchor(const BoundaryManifold& inflow, Vec2 x0, int ordinate) {
  double d = 0.0;
  const int b = inflow.nearest(x0, ordinate, &d);
  if (b < 0 || d > 1e-9)
    throw ArgumentError("anchor (" + std::to_string(x0.x) + ", " + std::to_string(x0.y) +
                        ") with ordinate " + std::to_string(ordinate) +
                        " is not a node of the inflow manifold");
  return b;
}

BoundaryField make_source(const Grid& grid, const BoundaryManifold& inflow, const SourceSpec& spec) {
  if (inflow.side() != Side::Minus) throw ArgumentError("sources live on the inflow manifold");
  if (spec.anchor < 0 || static_cast<std::size_t>(spec.anchor) >= inflow.size())
    throw ArgumentError("source anchor is not a node of the inflow manifold");
  BoundaryField f{Side::Minus, std::vector<double>(inflow.size(), 0.0)};
  if (spec.delta || spec.epsilon < grid.dx()) {
    f[static_cast<std::size_t>(spec.anchor)] = 1.0;
    return f;
  }
  const BoundaryNode& a = inflow[static_cast<std::size_t>(spec.anchor)];
  const Vec2 v0 = grid.direction(a.ordinate);
  for (std::size_t b = 0; b < inflow.size(); ++b) {
    const BoundaryNode& n = inflow[b];
    const double px = bump_psi((n.x - a.x).norm() / spec.epsilon);
    if (px == 0.0) continue;
    f[b] = px * bump_psi((grid.direction(n.ordinate) - v0).norm() / spec.epsilon);
  }
  return f;
}

namespace {

double wrap_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  a = std::fmod(a, two_pi);
  if (a < 0) a += two_pi;
  return a;
}

// Signed difference b - a folded into (-pi, pi].
double angle_diff(double a, double b) {
  double d = wrap_angle(b - a);
  if (d > std::numbers::pi) d -= 2.0 * std::numbers::pi;
  return d;
}

}  // namespace

bool on_single_scatter_manifold(const Grid& grid, Vec2 anchor, Vec2 v0, Vec2 exit, Vec2 x, int j) {
  const Vec2 v = grid.direction(j);
  if ((v - v0).norm() < 1e-12) return false;
  // Directions from beam points to x sweep a single arc as the beam point
  // moves from the anchor to the exit.
  const Vec2 d0 = x - anchor;
  Vec2 d1 = x - exit;
  if (d0.norm() < 1e-12) return false;
  if (d1.norm() < 1e-12) d1 = v0;
  const double a0 = std::atan2(d0.y, d0.x);
  const double span = angle_diff(a0, std::atan2(d1.y, d1.x));
  const double half = 0.5 * grid.ordinate_spacing();
  const double rel = angle_diff(a0, grid.angle(j));
  const double lo = std::min(0.0, span) - half;
  const double hi = std::max(0.0, span) + half;
  return rel >= lo && rel <= hi;
}

void extract_components(const Transport& t, Experiment& exp) {
  const Grid& g = t.grid();
  const BoundaryManifold& out = t.outflow();
  const BoundaryNode& a = t.inflow()[static_cast<std::size_t>(exp.source.anchor)];
  const Vec2 v0 = g.direction(a.ordinate);
  exp.counterpart = counterpart(g, a.x, v0).first;
  double d = 0.0;
  exp.receiver = out.nearest(exp.counterpart, a.ordinate, &d);
  exp.snap_distance = d;
  if (exp.receiver < 0 || d > g.dx() + 1e-12)
    throw ConfigurationError("counterpart of the anchor is " + std::to_string(d) +
                             " away from the nearest outflow node (limit dx)");

  const std::size_t n = out.size();
  exp.r1 = {Side::Plus, std::vector<double>(n, 0.0)};
  exp.r2 = exp.r1;
  exp.r3 = exp.r1;
  exp.scatter_mask.assign(n, 0);
  for (std::size_t b = 0; b < n; ++b) {
    const double phi = exp.phi[b];
    if (static_cast<int>(b) == exp.receiver) {
      exp.r1[b] = phi;
    } else if (on_single_scatter_manifold(g, a.x, v0, exp.counterpart, out[b].x, out[b].ordinate)) {
      exp.scatter_mask[b] = 1;
      exp.r2[b] = phi;
    } else {
      exp.r3[b] = phi;
    }
  }
}

Experiment run_experiment(const Transport& t, const SourceSpec& spec, SolveOptions opts) {
  Experiment exp;
  exp.source = spec;
  exp.f_minus = make_source(t.grid(), t.inflow(), spec);
  Decomposition d = decompose_neumann(t, exp.f_minus, opts);
  exp.phi = t.restrict(d.f, Side::Plus);
  exp.phi1 = t.restrict(d.f1, Side::Plus);
  exp.phi2 = t.restrict(d.f2, Side::Plus);
  exp.phi3 = t.restrict(d.f3, Side::Plus);
  exp.iterations = d.iterations;
  exp.residual = d.residual;
  extract_components(t, exp);
  return exp;
}

MollifiedReadout mollified_functionals(const Transport& t, const Experiment& exp, double eps1) {
  if (!(eps1 > 0.0)) throw ArgumentError("eps1 must be positive");
  const Grid& g = t.grid();
  const BoundaryManifold& out = t.outflow();
  const BoundaryNode& a = t.inflow()[static_cast<std::size_t>(exp.source.anchor)];
  MollifiedReadout r;
  r.receiver_point = exp.counterpart;
  r.receiver_ordinate = a.ordinate;
  r.eps1 = eps1;
  r.degenerate = eps1 < g.dx();
  const Vec2 v0 = g.direction(a.ordinate);
  for (std::size_t b = 0; b < out.size(); ++b) {
    double w = 0.0;
    if (r.degenerate) {
      w = static_cast<int>(b) == exp.receiver ? 1.0 : 0.0;
    } else {
      w = bump_psi((out[b].x - exp.counterpart).norm() / eps1);
      if (w != 0.0) w *= bump_psi((g.direction(out[b].ordinate) - v0).norm() / eps1);
    }
    if (w == 0.0) continue;
    w *= out[b].weight;
    r.e1 += w * exp.phi1[b];
    r.e2 += w * exp.phi2[b];
    r.e3 += w * exp.phi3[b];
  }
  return r;
}

BeamDesign design_parallel_beam(const Transport& t, int n_angles, int n_offsets,
                                double offset_extent, double foot_tolerance) {
  if (n_angles < 1 || n_offsets < 1) throw ArgumentError("beam design needs angles and offsets");
  const Grid& g = t.grid();
  const BoundaryManifold& in = t.inflow();
  const BoundaryManifold& out = t.outflow();
  const Vec2 centre{0.5, 0.5};
  BeamDesign design;

  for (int a = 0; a < n_angles; ++a) {
    const int j = static_cast<int>(std::lround(a * (0.5 * g.nv()) / n_angles)) % g.nv();
    const Vec2 v = g.direction(j);
    const Vec2 perp{-v.y, v.x};
    // Inflow nodes for this ordinate, reused across offsets.
    std::vector<int> candidates;
    for (std::size_t b = 0; b < in.size(); ++b)
      if (in[b].ordinate == j) candidates.push_back(static_cast<int>(b));

    for (int k = 0; k < n_offsets; ++k) {
      const double s = n_offsets == 1 ? 0.0
                                      : offset_extent * (2.0 * (k + 0.5) / n_offsets - 1.0);
      const Vec2 mid = centre + perp * s;
      const Vec2 entry = mid - v * exit_time(g, mid, v, Sign::Minus);
      std::sort(candidates.begin(), candidates.end(), [&](int p, int q) {
        return (in[static_cast<std::size_t>(p)].x - entry).norm() <
               (in[static_cast<std::size_t>(q)].x - entry).norm();
      });
      bool accepted = false;
      for (std::size_t c = 0; c < std::min<std::size_t>(6, candidates.size()) && !accepted; ++c) {
        const BoundaryNode& an = in[static_cast<std::size_t>(candidates[c])];
        const Vec2 xs = counterpart(g, an.x, v).first;
        double snap = 0.0;
        const int r = out.nearest(xs, j, &snap);
        if (r < 0 || snap > 0.5 * g.dx() + 1e-12) continue;
        const Vec2 rx = out[static_cast<std::size_t>(r)].x;
        const Vec2 foot = rx - v * exit_time(g, rx, v, Sign::Minus);
        const double offset = (foot - an.x).norm();
        if (offset > foot_tolerance + 1e-12) continue;
        bool duplicate = false;
        for (const auto& ch : design.chords)
          if (ch.anchor == candidates[c]) duplicate = true;
        if (duplicate) continue;
        design.chords.push_back({candidates[c], r, j, a, k, offset});
        accepted = true;
      }
      if (!accepted) ++design.rejected;
    }
  }
  return design;
}

}  // namespace rte
