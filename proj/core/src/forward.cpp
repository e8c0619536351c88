#include "rte/forward.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "rte/error.hpp"

namespace rte {

namespace {

SolveResult iterate(const Transport& t, const PhaseField& q, const SolveOptions& opts) {
  if (!(opts.tol > 0.0)) throw ArgumentError("solver tolerance must be positive");
  if (opts.max_iter < 1) throw ArgumentError("max_iter must be >= 1");
  SolveResult r;
  if (t.medium().kernel().is_zero()) {
    r.f = q;
    r.iterations = 1;
    r.history.push_back(0.0);
    return r;
  }
  PhaseField f = q;
  for (int it = 1; it <= opts.max_iter; ++it) {
    PhaseField next = q - t.apply_inverse(t.apply_scattering(f));
    double diff = 0.0;
    const auto& a = next.values();
    const auto& b = f.values();
    for (std::size_t i = 0; i < a.size(); ++i) diff = std::max(diff, std::abs(a[i] - b[i]));
    f = std::move(next);
    r.history.push_back(diff);
    if (diff <= opts.tol) {
      r.f = std::move(f);
      r.iterations = it;
      r.residual = diff;
      return r;
    }
  }
  throw ConvergenceError("source iteration did not reach tol " + std::to_string(opts.tol) +
                             " in " + std::to_string(opts.max_iter) + " iterations (last " +
                             std::to_string(r.history.back()) + ")",
                         opts.max_iter, r.history.back());
}

}  // namespace

SolveResult solve_forward(const Transport& t, const BoundaryField& f_minus, SolveOptions opts) {
  return iterate(t, t.lift(f_minus), opts);
}

SolveResult solve_fixed_point(const Transport& t, const PhaseField& q, SolveOptions opts) {
  if (!q.matches(t.grid())) throw ArgumentError("source does not match the grid");
  return iterate(t, q, opts);
}

Decomposition decompose_neumann(const Transport& t, const BoundaryField& f_minus,
                                SolveOptions opts) {
  Decomposition d;
  d.f1 = t.lift(f_minus);
  SolveResult full = iterate(t, d.f1, opts);
  d.f2 = t.apply_inverse(t.apply_scattering(d.f1));
  d.f2 *= -1.0;
  // f3 solves its own fixed point f3 = q3 - A^{-1} B f3 with q3 = -A^{-1} B f2,
  // so f1 + f2 + f3 = f is a check rather than a definition.
  if (t.medium().kernel().is_zero()) {
    d.f3 = PhaseField(t.grid());
  } else {
    PhaseField q3 = t.apply_inverse(t.apply_scattering(d.f2));
    q3 *= -1.0;
    d.f3 = iterate(t, q3, opts).f;
  }
  d.f = std::move(full.f);
  d.residual = full.residual;
  d.iterations = full.iterations;
  return d;
}

namespace {

// Composite 4-point Gauss-Legendre for int_0^len g(r) dr.
template <class F>
double gauss_segments(F&& g, double len, int segs) {
  if (len <= 0.0) return 0.0;
  static constexpr double xg[4] = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                                   0.8611363115940526};
  static constexpr double wg[4] = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                                   0.3478548451374538};
  const double h = len / segs;
  double acc = 0.0;
  for (int k = 0; k < segs; ++k) {
    const double mid = (k + 0.5) * h;
    for (int q = 0; q < 4; ++q) acc += wg[q] * g(mid + 0.5 * h * xg[q]);
  }
  return 0.5 * h * acc;
}

template <class F>
double line_integral(F&& g, double len, int per_unit) {
  return gauss_segments(g, len, std::max(1, static_cast<int>(std::ceil(len * per_unit / 4.0))));
}

bool on_wall(Edge e, Vec2 p) {
  switch (e) {
    case Edge::Left: return std::abs(p.x) <= 1e-12;
    case Edge::Right: return std::abs(p.x - 1.0) <= 1e-12;
    case Edge::Bottom: return std::abs(p.y) <= 1e-12;
    case Edge::Top: return std::abs(p.y - 1.0) <= 1e-12;
  }
  return false;
}

Vec2 edge_point(Edge e, double c) {
  switch (e) {
    case Edge::Left: return {0.0, c};
    case Edge::Right: return {1.0, c};
    case Edge::Bottom: return {c, 0.0};
    case Edge::Top: return {c, 1.0};
  }
  return {};
}

Vec2 edge_tangent(Edge e) {
  return (e == Edge::Left || e == Edge::Right) ? Vec2{0.0, 1.0} : Vec2{1.0, 0.0};
}

double kernel_at(const Medium& m, Vec2 p, double dtheta) {
  double acc = 0.0;
  for (int q = 0; q <= m.kernel().order(); ++q) acc += m.coefficient_at(p, q) * std::cos(q * dtheta);
  return acc / m.grid().velocity_measure();
}

}  // namespace

double single_scatter_oracle(const Medium& m, const BoundaryManifold& inflow, int source,
                             const BoundaryManifold& outflow, int receiver, OracleOptions opts) {
  if (source < 0 || static_cast<std::size_t>(source) >= inflow.size())
    throw ArgumentError("source index out of range");
  if (receiver < 0 || static_cast<std::size_t>(receiver) >= outflow.size())
    throw ArgumentError("receiver index out of range");
  if (inflow.side() != Side::Minus || outflow.side() != Side::Plus)
    throw ArgumentError("oracle needs an inflow and an outflow manifold");
  const Grid& g = m.grid();
  const BoundaryNode& src = inflow[static_cast<std::size_t>(source)];
  const BoundaryNode& rcv = outflow[static_cast<std::size_t>(receiver)];
  const Vec2 vs = g.direction(src.ordinate);
  const Vec2 vr = g.direction(rcv.ordinate);
  const double ws = g.weight(src.ordinate);
  const double dtheta = g.angle(rcv.ordinate) - g.angle(src.ordinate);
  const double h = g.dx();
  const Vec2 x = rcv.x;
  const double tau_r = exit_time(g, x, vr, Sign::Minus);
  const int ppu = opts.points_per_unit;
  auto sigma = [&](Vec2 p) { return m.sigma_at(p); };
  const double det = vs.cross(vr);

  double total = 0.0;
  for (int e = 0; e < edge_count(g); ++e) {
    const Edge edge = static_cast<Edge>(e);
    const Vec2 n = edge_normal(edge);
    const double nv = n.dot(vs);
    if (nv > -1e-10) continue;
    if (!on_wall(edge, src.x)) continue;
    const double c0 = edge_coordinate(edge, src.x);
    auto hat = [&](double c) { return std::max(0.0, 1.0 - std::abs(c - c0) / h); };

    if (std::abs(det) < 1e-12) {
      // Receiver ray collinear with the beam (forward or back scattering): each
      // point on it is lit by the beam through its own foot on the wall.
      auto integrand = [&](double s) {
        const Vec2 z = x - vr * s;
        const Exit ex = exit_point(g, z, vs, Sign::Minus);
        if (ex.edge != edge) return 0.0;
        const double hv = hat(edge_coordinate(edge, z - vs * ex.time));
        if (hv == 0.0) return 0.0;
        const double src_depth =
            line_integral([&](double r) { return sigma(z - vs * r); }, ex.time, ppu);
        const double rcv_depth = line_integral([&](double r) { return sigma(x - vr * r); }, s, ppu);
        return hv * kernel_at(m, z, dtheta) * std::exp(-src_depth - rcv_depth);
      };
      total += ws * line_integral(integrand, tau_r, ppu);
      continue;
    }

    // Beam point P(c) + t vs meets the receiver line x - s vr where
    // t vs + s vr = x - P(c); both t and s are affine in c.
    const Vec2 tan = edge_tangent(edge);
    auto solve = [&](double c) {
      const Vec2 d = x - edge_point(edge, c);
      const double t = d.cross(vr) / det;
      const double s = vs.cross(d) / det;
      return std::pair{t, s};
    };
    double lo = std::max(0.0, c0 - h);
    double hi = std::min(1.0, c0 + h);
    // Clip to t >= 0 and 0 <= s <= tau_r (affine constraints in c).
    auto clip = [&](double a0, double a1, double lower, double upper) {
      // value(c) = a0 + a1 * c must stay within [lower, upper]
      if (std::abs(a1) < 1e-300) {
        if (a0 < lower || a0 > upper) hi = lo - 1.0;
        return;
      }
      double c_lo = (lower - a0) / a1, c_hi = (upper - a0) / a1;
      if (c_lo > c_hi) std::swap(c_lo, c_hi);
      lo = std::max(lo, c_lo);
      hi = std::min(hi, c_hi);
    };
    const auto [t0, s0] = solve(0.0);
    const auto [t1, s1] = solve(1.0);
    clip(t0, t1 - t0, 0.0, std::numeric_limits<double>::infinity());
    clip(s0, s1 - s0, 0.0, tau_r);
    if (!(hi > lo)) continue;
    const double jac = std::abs(vs.cross(tan)) / std::abs(det);

    auto integrand = [&](double c) {
      const auto [t, s] = solve(c);
      const Vec2 z = x - vr * s;
      const double src_depth =
          line_integral([&](double r) { return sigma(z - vs * r); }, t, ppu);
      const double rcv_depth = line_integral([&](double r) { return sigma(x - vr * r); }, s, ppu);
      return hat(c) * kernel_at(m, z, dtheta) * std::exp(-src_depth - rcv_depth);
    };
    // Split at the hat's peak so each piece is smooth.
    double acc = 0.0;
    const double pieces[3] = {lo, std::clamp(c0, lo, hi), hi};
    for (int q = 0; q < 2; ++q) {
      const double a = pieces[q], b = pieces[q + 1];
      if (b <= a) continue;
      acc += gauss_segments([&](double r) { return integrand(a + r); }, b - a, 4);
    }
    total += ws * jac * acc;
  }
  return total;
}

}  // namespace rte
