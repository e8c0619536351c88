#include "rte/transport.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "rte/error.hpp"

namespace rte {

PhaseField::PhaseField(int n_spatial, int nv, double fill)
    : n_spatial_(n_spatial),
      nv_(nv),
      data_(static_cast<std::size_t>(n_spatial) * static_cast<std::size_t>(nv), fill) {}

PhaseField& PhaseField::operator+=(const PhaseField& o) {
  if (o.n_spatial_ != n_spatial_ || o.nv_ != nv_) throw ArgumentError("phase field shape mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
  return *this;
}

PhaseField& PhaseField::operator-=(const PhaseField& o) {
  if (o.n_spatial_ != n_spatial_ || o.nv_ != nv_) throw ArgumentError("phase field shape mismatch");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
  return *this;
}

PhaseField& PhaseField::operator*=(double a) {
  for (double& d : data_) d *= a;
  return *this;
}

double PhaseField::max_abs() const {
  double m = 0.0;
  for (double d : data_) m = std::max(m, std::abs(d));
  return m;
}

PhaseField operator+(PhaseField a, const PhaseField& b) { return a += b; }
PhaseField operator-(PhaseField a, const PhaseField& b) { return a -= b; }
PhaseField operator*(double s, PhaseField a) { return a *= s; }

namespace {

struct Bilinear {
  std::size_t n00, n10, n01, n11;
  double w00, w10, w01, w11;

  double operator()(const double* f) const {
    return w00 * f[n00] + w10 * f[n10] + w01 * f[n01] + w11 * f[n11];
  }
  void scatter(double* f, double value) const {
    f[n00] += w00 * value;
    f[n10] += w10 * value;
    f[n01] += w01 * value;
    f[n11] += w11 * value;
  }
};

inline Bilinear locate(int n, double px, double py) {
  const double fx = px * n;
  const double fy = py * n;
  const int i = std::clamp(static_cast<int>(std::floor(fx)), 0, n - 1);
  const int k = std::clamp(static_cast<int>(std::floor(fy)), 0, n - 1);
  const double ax = std::clamp(fx - i, 0.0, 1.0);
  const double ay = std::clamp(fy - k, 0.0, 1.0);
  const auto stride = static_cast<std::size_t>(n + 1);
  const std::size_t base = static_cast<std::size_t>(i) + static_cast<std::size_t>(k) * stride;
  return {base,
          base + 1,
          base + stride,
          base + stride + 1,
          (1 - ax) * (1 - ay),
          ax * (1 - ay),
          (1 - ax) * ay,
          ax * ay};
}

// Trapezoid integral of sigma along the backward chord of node s.
double chord_optical_depth(const Grid& grid, const double* sigma, int s, Vec2 v, double tau) {
  const int m = chord_samples(tau, grid.dx());
  if (m == 1) return 0.0;
  const double dt = tau / (m - 1);
  const Vec2 x = grid.node(s);
  double acc = 0.5 * sigma[s];
  for (int k = 1; k < m; ++k) {
    const double t = k * dt;
    const double sk = locate(grid.nx(), x.x - t * v.x, x.y - t * v.y)(sigma);
    acc += (k == m - 1 ? 0.5 : 1.0) * sk;
  }
  return acc * dt;
}

// Walks the backward chord of node s and calls visit(sample, weight) with the
// trapezoid weight times exp(-int_0^t sigma), the optical depth accumulated
// by the same trapezoid rule. Forward and transpose share this walk, so they
// stay exact adjoints of each other.
template <class Visit>
void walk_chord(const Grid& grid, const double* sigma, int s, Vec2 v, Visit&& visit) {
  const Vec2 x = grid.node(s);
  const double tau = exit_time(grid, x, v, Sign::Minus);
  const int m = chord_samples(tau, grid.dx());
  if (m == 1) return;
  const double dt = tau / (m - 1);
  const int n = grid.nx();
  const auto self = static_cast<std::size_t>(s);
  visit(Bilinear{self, self, self, self, 1.0, 0.0, 0.0, 0.0}, 0.5 * dt);
  double prev = sigma[s], depth = 0.0;
  for (int k = 1; k < m; ++k) {
    const double t = k * dt;
    const Bilinear at = locate(n, x.x - t * v.x, x.y - t * v.y);
    const double sk = at(sigma);
    depth += 0.5 * dt * (prev + sk);
    prev = sk;
    visit(at, (k == m - 1 ? 0.5 : 1.0) * dt * std::exp(-depth));
  }
}

PhaseField apply_kernel_impl(const Grid& grid, const ScatteringKernel& kernel, const PhaseField& f,
                             bool transpose) {
  if (!f.matches(grid)) throw ArgumentError("phase field does not match the grid");
  if (kernel.n_spatial() != grid.spatial_count())
    throw ArgumentError("kernel does not match the grid");
  const int ns = grid.spatial_count();
  const int nv = grid.nv();
  const int terms = kernel.terms();
  const double inv_measure = 1.0 / grid.velocity_measure();
  PhaseField out(grid);

  if (terms == 1) {
    // Isotropic: weighted angular sum per node.
    std::vector<double> sum(static_cast<std::size_t>(ns), 0.0);
    for (int j = 0; j < nv; ++j) {
      const double w = transpose ? 1.0 : grid.weight(j);
      const double* fj = f.ordinate(j);
      for (int s = 0; s < ns; ++s) sum[static_cast<std::size_t>(s)] += w * fj[s];
    }
    for (int i = 0; i < nv; ++i) {
      const double w = transpose ? grid.weight(i) : 1.0;
      double* oi = out.ordinate(i);
      for (int s = 0; s < ns; ++s)
        oi[s] = w * inv_measure * kernel.coefficient(s, 0) * sum[static_cast<std::size_t>(s)];
    }
    return out;
  }

  // cos(p(a - b)) = cos pa cos pb + sin pa sin pb turns the angular
  // convolution into 2(P+1) moments per node.
  std::vector<double> cs(static_cast<std::size_t>(terms * nv)), sn(cs.size());
  for (int p = 0; p < terms; ++p)
    for (int j = 0; j < nv; ++j) {
      cs[static_cast<std::size_t>(p * nv + j)] = std::cos(p * grid.angle(j));
      sn[static_cast<std::size_t>(p * nv + j)] = std::sin(p * grid.angle(j));
    }
  const auto nsz = static_cast<std::size_t>(ns);
  std::vector<double> cm(static_cast<std::size_t>(terms) * nsz, 0.0), sm(cm.size(), 0.0);
  for (int j = 0; j < nv; ++j) {
    const double w = transpose ? 1.0 : grid.weight(j);
    const double* fj = f.ordinate(j);
    for (int p = 0; p < terms; ++p) {
      const double a = w * cs[static_cast<std::size_t>(p * nv + j)];
      const double b = w * sn[static_cast<std::size_t>(p * nv + j)];
      double* cp = cm.data() + static_cast<std::size_t>(p) * nsz;
      double* sp = sm.data() + static_cast<std::size_t>(p) * nsz;
      for (int s = 0; s < ns; ++s) {
        cp[s] += a * fj[s];
        sp[s] += b * fj[s];
      }
    }
  }
  for (int i = 0; i < nv; ++i) {
    const double w = (transpose ? grid.weight(i) : 1.0) * inv_measure;
    double* oi = out.ordinate(i);
    for (int s = 0; s < ns; ++s) {
      double acc = 0.0;
      for (int p = 0; p < terms; ++p) {
        const auto pi = static_cast<std::size_t>(p * nv + i);
        const std::size_t ps = static_cast<std::size_t>(p) * nsz + static_cast<std::size_t>(s);
        acc += kernel.coefficient(s, p) * (cs[pi] * cm[ps] + sn[pi] * sm[ps]);
      }
      oi[s] = w * acc;
    }
  }
  return out;
}

}  // namespace

PhaseField apply_kernel(const Grid& grid, const ScatteringKernel& kernel, const PhaseField& f) {
  return apply_kernel_impl(grid, kernel, f, false);
}

Transport::Transport(Medium medium)
    : medium_(std::move(medium)),
      inflow_(medium_.grid(), Side::Minus),
      outflow_(medium_.grid(), Side::Plus) {
  const Grid& g = grid();
  const int ns = g.spatial_count();
  const double* sigma = medium_.sigma().data();
  depth_.assign(g.phase_size(), 0.0);
#pragma omp parallel for schedule(dynamic)
  for (int j = 0; j < g.nv(); ++j) {
    const Vec2 v = g.direction(j);
    for (int s = 0; s < ns; ++s)
      depth_[g.phase_index(s, j)] =
          chord_optical_depth(g, sigma, s, v, exit_time(g, g.node(s), v, Sign::Minus));
  }
}

BoundaryField Transport::boundary(Side side, double fill) const {
  return {side, std::vector<double>(manifold(side).size(), fill)};
}

void Transport::check(const PhaseField& f) const {
  if (!f.matches(grid())) throw ArgumentError("phase field does not match the transport grid");
}

double Transport::foot_value(const BoundaryField& fm, Edge edge, double coord, int j) const {
  const int n = grid().nx();
  const double c = coord * n;
  const int i = std::clamp(static_cast<int>(std::floor(c)), 0, n - 1);
  const double a = std::clamp(c - i, 0.0, 1.0);
  auto value = [&](int q) -> std::optional<double> {
    const int b = inflow_.edge_node(edge, q, j);
    if (b < 0) return std::nullopt;
    return fm[static_cast<std::size_t>(b)];
  };
  const auto lo = value(i);
  const auto hi = value(i + 1);
  // An end node missing from the manifold (a corner whose other wall is
  // outflow for this ordinate) borrows its neighbour along the edge.
  const double vlo = lo ? *lo : hi.value_or(0.0);
  const double vhi = hi ? *hi : lo.value_or(0.0);
  constexpr double kSnap = 1e-12;
  if (a * grid().dx() <= kSnap) return vlo;
  if ((1.0 - a) * grid().dx() <= kSnap) return vhi;
  return (1.0 - a) * vlo + a * vhi;
}

PhaseField Transport::lift(const BoundaryField& fm) const {
  if (fm.side != Side::Minus || fm.size() != inflow_.size())
    throw ArgumentError("lift expects a field on the inflow manifold");
  const Grid& g = grid();
  const int ns = g.spatial_count();
  const int nv = g.nv();
  PhaseField out(g);
#pragma omp parallel for schedule(dynamic)
  for (int j = 0; j < nv; ++j) {
    const Vec2 v = g.direction(j);
    const double* dj = depth_.data() + g.phase_index(0, j);
    double* oj = out.ordinate(j);
    for (int s = 0; s < ns; ++s) {
      const int b = inflow_.find(s, j);
      if (b >= 0) {
        oj[s] = fm[static_cast<std::size_t>(b)];
        continue;
      }
      const Vec2 x = g.node(s);
      const Exit ex = exit_point(g, x, v, Sign::Minus);
      const double val = foot_value(fm, ex.edge, edge_coordinate(ex.edge, x - v * ex.time), j);
      if (val == 0.0) {
        oj[s] = 0.0;
        continue;
      }
      oj[s] = std::exp(-dj[s]) * val;
    }
  }
  return out;
}

PhaseField Transport::apply_inverse(const PhaseField& gf) const {
  check(gf);
  const Grid& g = grid();
  const int ns = g.spatial_count();
  const double* sigma = medium_.sigma().data();
  PhaseField out(g);
#pragma omp parallel for schedule(dynamic)
  for (int j = 0; j < g.nv(); ++j) {
    const Vec2 v = g.direction(j);
    const double* gj = gf.ordinate(j);
    double* oj = out.ordinate(j);
    for (int s = 0; s < ns; ++s) {
      double acc = 0.0;
      walk_chord(g, sigma, s, v, [&](const Bilinear& at, double w) { acc += w * at(gj); });
      oj[s] = -acc;
    }
  }
  return out;
}

PhaseField Transport::apply_inverse_transpose(const PhaseField& h) const {
  check(h);
  const Grid& g = grid();
  const int ns = g.spatial_count();
  const double* sigma = medium_.sigma().data();
  PhaseField out(g);
  // Each ordinate only writes into its own block, so the loop stays race free.
#pragma omp parallel for schedule(dynamic)
  for (int j = 0; j < g.nv(); ++j) {
    const Vec2 v = g.direction(j);
    const double* hj = h.ordinate(j);
    double* oj = out.ordinate(j);
    for (int s = 0; s < ns; ++s) {
      if (hj[s] == 0.0) continue;
      const double hs = -hj[s];
      walk_chord(g, sigma, s, v, [&](const Bilinear& at, double w) { at.scatter(oj, w * hs); });
    }
  }
  return out;
}

PhaseField Transport::apply_scattering(const PhaseField& f) const {
  check(f);
  return apply_kernel_impl(grid(), medium_.kernel(), f, false);
}

PhaseField Transport::apply_scattering_transpose(const PhaseField& f) const {
  check(f);
  return apply_kernel_impl(grid(), medium_.kernel(), f, true);
}

BoundaryField Transport::restrict(const PhaseField& f, Side side) const {
  check(f);
  const BoundaryManifold& man = manifold(side);
  BoundaryField out{side, std::vector<double>(man.size())};
  for (std::size_t b = 0; b < man.size(); ++b) out[b] = f(man[b].spatial, man[b].ordinate);
  return out;
}

PhaseField Transport::apply_operator(const PhaseField& u) const {
  check(u);
  const Grid& g = grid();
  const int n = g.nx();
  if (n < 2) throw ArgumentError("apply_operator needs nx >= 2");
  const double h = g.dx();
  PhaseField out(g);
  auto diff = [&](const double* f, int ix, int iy, bool along_x) {
    auto at = [&](int q) { return along_x ? f[g.node_index(q, iy)] : f[g.node_index(ix, q)]; };
    const int q = along_x ? ix : iy;
    if (q == 0) return (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * h);
    if (q == n) return (3.0 * at(n) - 4.0 * at(n - 1) + at(n - 2)) / (2.0 * h);
    return (at(q + 1) - at(q - 1)) / (2.0 * h);
  };
  for (int j = 0; j < g.nv(); ++j) {
    const Vec2 v = g.direction(j);
    const double* uj = u.ordinate(j);
    double* oj = out.ordinate(j);
    for (int iy = 0; iy <= n; ++iy)
      for (int ix = 0; ix <= n; ++ix) {
        const int s = g.node_index(ix, iy);
        oj[s] = -(v.x * diff(uj, ix, iy, true) + v.y * diff(uj, ix, iy, false)) -
                medium_.sigma(s) * uj[s];
      }
  }
  return out;
}

}  // namespace rte
