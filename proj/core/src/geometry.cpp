#include "rte/geometry.hpp"

#include <algorithm>
#include <limits>
#include <numbers>
#include <string>

#include "rte/error.hpp"

namespace rte {

namespace {

constexpr double kBoundaryTol = 1e-12;
constexpr double kGrazing = 1e-10;
// Direction components below this are treated as exactly parallel to a wall.
constexpr double kParallel = 1e-14;

double snap_zero(double c) { return std::abs(c) < 1e-15 ? 0.0 : c; }

}  // namespace

Grid Grid::square(int nx, int nv) {
  if (nx < 1) throw ArgumentError("nx must be >= 1");
  if (nv < 1) throw ArgumentError("nv must be >= 1");
  Grid g(Dimension::Square, nx);
  const double h = 2.0 * std::numbers::pi / nv;
  for (int j = 0; j < nv; ++j) {
    const double th = h * j;
    g.angles_.push_back(th);
    g.dirs_.push_back({snap_zero(std::cos(th)), snap_zero(std::sin(th))});
    g.weights_.push_back(h);
  }
  return g;
}

Grid Grid::slab(int nx, int nv, SlabNodes nodes) {
  if (nx < 1) throw ArgumentError("nx must be >= 1");
  if (nv < 2) throw ArgumentError("slab needs at least 2 ordinates");
  Grid g(Dimension::Slab, nx);
  if (nodes == SlabNodes::Gauss) {
    auto [mu, w] = gauss_legendre(nv);
    for (int j = 0; j < nv; ++j) {
      g.dirs_.push_back({mu[static_cast<std::size_t>(j)], 0.0});
      g.weights_.push_back(w[static_cast<std::size_t>(j)]);
    }
  } else {
    // Midpoint nodes avoid mu = 0, which never leaves the slab.
    const double h = 2.0 / nv;
    for (int j = 0; j < nv; ++j) {
      g.dirs_.push_back({-1.0 + h * (j + 0.5), 0.0});
      g.weights_.push_back(h);
    }
  }
  for (const auto& d : g.dirs_) g.angles_.push_back(std::acos(std::clamp(d.x, -1.0, 1.0)));
  return g;
}

Vec2 Grid::node(int s) const {
  const auto [ix, iy] = node_coords(s);
  return {static_cast<double>(ix) / nx_, static_cast<double>(iy) / nx_};
}

bool Grid::on_boundary(int s) const {
  const auto [ix, iy] = node_coords(s);
  if (ix == 0 || ix == nx_) return true;
  return is_square() && (iy == 0 || iy == nx_);
}

double Grid::velocity_measure() const { return is_square() ? 2.0 * std::numbers::pi : 2.0; }

double Grid::ordinate_spacing() const {
  if (is_square()) return 2.0 * std::numbers::pi / nv();
  double gap = 0.0;
  for (int j = 1; j < nv(); ++j) gap = std::max(gap, dirs_[j].x - dirs_[j - 1].x);
  return gap;
}

int Grid::nearest_ordinate(Vec2 v) const {
  if (is_square()) {
    double th = std::atan2(v.y, v.x);
    if (th < 0) th += 2.0 * std::numbers::pi;
    const int j = static_cast<int>(std::lround(th / ordinate_spacing()));
    return j % nv();
  }
  int best = 0;
  for (int j = 1; j < nv(); ++j)
    if (std::abs(dirs_[j].x - v.x) < std::abs(dirs_[best].x - v.x)) best = j;
  return best;
}

bool Grid::contains(Vec2 p, double tol) const {
  const bool in_x = p.x >= -tol && p.x <= 1.0 + tol;
  if (!is_square()) return in_x;
  return in_x && p.y >= -tol && p.y <= 1.0 + tol;
}

std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n) {
  if (n < 1) throw ArgumentError("gauss_legendre needs n >= 1");
  std::vector<double> x(static_cast<std::size_t>(n)), w(static_cast<std::size_t>(n));
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    const auto lo = static_cast<std::size_t>(i);
    const auto hi = static_cast<std::size_t>(n - 1 - i);
    x[lo] = -z;
    x[hi] = z;
    w[lo] = w[hi] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  return {x, w};
}

Exit exit_point(const Grid& grid, Vec2 x, Vec2 v, Sign sign) {
  if (!grid.contains(x, kBoundaryTol))
    throw DomainError("point (" + std::to_string(x.x) + ", " + std::to_string(x.y) +
                      ") is outside the domain");
  const double s = sign == Sign::Plus ? 1.0 : -1.0;
  const Vec2 w = v * s;
  Exit best{std::numeric_limits<double>::infinity(), Edge::Left};
  auto consider = [&](double t, Edge e) {
    t = std::max(t, 0.0);
    if (t < best.time) best = {t, e};
  };
  if (w.x > kParallel) consider((1.0 - x.x) / w.x, Edge::Right);
  if (w.x < -kParallel) consider(-x.x / w.x, Edge::Left);
  if (grid.is_square()) {
    if (w.y > kParallel) consider((1.0 - x.y) / w.y, Edge::Top);
    if (w.y < -kParallel) consider(-x.y / w.y, Edge::Bottom);
  }
  if (!std::isfinite(best.time)) throw ArgumentError("direction never reaches the boundary");
  return best;
}

double exit_time(const Grid& grid, Vec2 x, Vec2 v, Sign sign) {
  return exit_point(grid, x, v, sign).time;
}

std::pair<Vec2, Vec2> counterpart(const Grid& grid, Vec2 x, Vec2 v) {
  const double t = exit_time(grid, x, v, Sign::Plus);
  return {x + v * t, v};
}

int chord_samples(double tau, double step) {
  if (tau <= kParallel) return 1;
  return static_cast<int>(std::ceil(tau / step - 1e-12)) + 1;
}

Chord trace_chord(const Grid& grid, Vec2 x, Vec2 v, double step) {
  if (!(step > 0.0)) throw ArgumentError("chord step must be positive");
  Chord c;
  c.origin = x;
  c.direction = v;
  c.length = exit_time(grid, x, v, Sign::Minus);
  c.count = chord_samples(c.length, step);
  c.spacing = c.count > 1 ? c.length / (c.count - 1) : 0.0;
  return c;
}

Vec2 edge_normal(Edge e) {
  switch (e) {
    case Edge::Left: return {-1.0, 0.0};
    case Edge::Right: return {1.0, 0.0};
    case Edge::Bottom: return {0.0, -1.0};
    case Edge::Top: return {0.0, 1.0};
  }
  return {};
}

int edge_count(const Grid& grid) { return grid.is_square() ? 4 : 2; }

int edge_spatial(const Grid& grid, Edge e, int i) {
  const int n = grid.nx();
  if (!grid.is_square()) return e == Edge::Left ? 0 : n;
  switch (e) {
    case Edge::Left: return grid.node_index(0, i);
    case Edge::Right: return grid.node_index(n, i);
    case Edge::Bottom: return grid.node_index(i, 0);
    case Edge::Top: return grid.node_index(i, n);
  }
  return -1;
}

double edge_coordinate(Edge e, Vec2 p) {
  return (e == Edge::Left || e == Edge::Right) ? p.y : p.x;
}

namespace {

// Walls passing through node s.
std::vector<Edge> walls_at(const Grid& grid, int s) {
  std::vector<Edge> walls;
  const auto [ix, iy] = grid.node_coords(s);
  const int n = grid.nx();
  if (ix == 0) walls.push_back(Edge::Left);
  if (ix == n) walls.push_back(Edge::Right);
  if (grid.is_square()) {
    if (iy == 0) walls.push_back(Edge::Bottom);
    if (iy == n) walls.push_back(Edge::Top);
  }
  return walls;
}

}  // namespace

BoundaryManifold::BoundaryManifold(const Grid& grid, Side side)
    : side_(side),
      dim_(grid.dimension()),
      nx_(grid.nx()),
      n_spatial_(grid.spatial_count()),
      nv_(grid.nv()),
      lookup_(grid.phase_size(), -1),
      by_ordinate_(static_cast<std::size_t>(grid.nv())) {
  const Sign here = side == Side::Minus ? Sign::Minus : Sign::Plus;
  const Sign there = side == Side::Minus ? Sign::Plus : Sign::Minus;
  // Inflow walls have n.v < 0, outflow walls n.v > 0.
  const double orient = side == Side::Minus ? -1.0 : 1.0;
  for (int j = 0; j < grid.nv(); ++j) {
    const Vec2 v = grid.direction(j);
    for (int s = 0; s < grid.spatial_count(); ++s) {
      if (!grid.on_boundary(s)) continue;
      const Vec2 x = grid.node(s);
      if (exit_time(grid, x, v, here) > kBoundaryTol) continue;
      if (exit_time(grid, x, v, there) <= kBoundaryTol) continue;
      const auto walls = walls_at(grid, s);
      const bool corner = walls.size() > 1;
      double weight = 0.0;
      double best_dot = 0.0;
      Vec2 normal;
      for (Edge e : walls) {
        const Vec2 n = edge_normal(e);
        const double nv = orient * n.dot(v);
        if (nv < kGrazing) continue;
        const double surface = grid.is_square() ? (corner ? 0.5 : 1.0) * grid.dx() : 1.0;
        weight += nv * surface * grid.weight(j);
        if (nv > best_dot) {
          best_dot = nv;
          normal = n;
        }
      }
      if (weight <= 0.0) continue;
      const int idx = static_cast<int>(nodes_.size());
      nodes_.push_back({s, j, x, normal, weight});
      lookup_[grid.phase_index(s, j)] = idx;
      by_ordinate_[static_cast<std::size_t>(j)].push_back(idx);
    }
  }
}

int BoundaryManifold::find(int spatial, int ordinate) const {
  if (spatial < 0 || spatial >= n_spatial_ || ordinate < 0 || ordinate >= nv_) return -1;
  return lookup_[static_cast<std::size_t>(ordinate) * static_cast<std::size_t>(n_spatial_) +
                 static_cast<std::size_t>(spatial)];
}

int BoundaryManifold::edge_node(Edge e, int i, int ordinate) const {
  int s = 0;
  const int n = nx_;
  if (dim_ == Dimension::Slab) {
    s = e == Edge::Left ? 0 : n;
  } else {
    switch (e) {
      case Edge::Left: s = i * (n + 1); break;
      case Edge::Right: s = n + i * (n + 1); break;
      case Edge::Bottom: s = i; break;
      case Edge::Top: s = i + n * (n + 1); break;
    }
  }
  return find(s, ordinate);
}

int BoundaryManifold::nearest(Vec2 p, int ordinate, double* distance) const {
  int best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  if (ordinate < 0 || ordinate >= nv_) throw ArgumentError("ordinate out of range");
  for (int idx : by_ordinate_[static_cast<std::size_t>(ordinate)]) {
    const double d = (nodes_[static_cast<std::size_t>(idx)].x - p).norm();
    if (d < best_d) {
      best_d = d;
      best = idx;
    }
  }
  if (distance) *distance = best_d;
  return best;
}

}  // namespace rte
