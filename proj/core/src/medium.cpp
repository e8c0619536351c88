#include "rte/medium.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "rte/error.hpp"
#include "rte/profile.hpp"
#include "rte/transport.hpp"

namespace rte {

ScatteringKernel::ScatteringKernel(int n_spatial, int order)
    : n_spatial_(n_spatial),
      order_(order),
      coeffs_(static_cast<std::size_t>(n_spatial) * static_cast<std::size_t>(order + 1), 0.0) {
  if (n_spatial < 0 || order < 0) throw ArgumentError("kernel sizes must be nonnegative");
}

ScatteringKernel::ScatteringKernel(int n_spatial, int order, std::vector<double> coeffs)
    : n_spatial_(n_spatial), order_(order), coeffs_(std::move(coeffs)) {
  if (n_spatial < 0 || order < 0) throw ArgumentError("kernel sizes must be nonnegative");
  if (coeffs_.size() != static_cast<std::size_t>(n_spatial) * static_cast<std::size_t>(order + 1))
    throw ArgumentError("kernel coefficient count does not match n_spatial * (order + 1)");
}

ScatteringKernel ScatteringKernel::isotropic(int n_spatial, double kappa) {
  return ScatteringKernel(n_spatial, 0,
                          std::vector<double>(static_cast<std::size_t>(n_spatial), kappa));
}

ScatteringKernel ScatteringKernel::isotropic(const std::vector<double>& kappa) {
  return ScatteringKernel(static_cast<int>(kappa.size()), 0, kappa);
}

bool ScatteringKernel::is_zero() const {
  return std::all_of(coeffs_.begin(), coeffs_.end(), [](double c) { return c == 0.0; });
}

ScatteringKernel ScatteringKernel::scaled(double a) const {
  ScatteringKernel out = *this;
  for (double& c : out.coeffs_) c *= a;
  return out;
}

Medium::Medium(Grid grid, std::vector<double> sigma, ScatteringKernel kernel, MediumOptions opts)
    : grid_(std::move(grid)), sigma_(std::move(sigma)), kernel_(std::move(kernel)),
      opts_(std::move(opts)) {
  if (!grid_.is_square()) throw ArgumentError("Medium is defined on square grids only");
  if (sigma_.size() != static_cast<std::size_t>(grid_.spatial_count()))
    throw ArgumentError("sigma has " + std::to_string(sigma_.size()) + " values, grid has " +
                        std::to_string(grid_.spatial_count()) + " nodes");
  if (kernel_.n_spatial() == 0 && kernel_.coefficients().empty())
    kernel_ = ScatteringKernel(grid_.spatial_count(), 0);
  if (kernel_.n_spatial() != grid_.spatial_count())
    throw ArgumentError("kernel and grid disagree on node count");
  if (!(opts_.knudsen > 0.0)) throw ArgumentError("Knudsen number must be positive");
  build_tables();
  validate();
}

Medium Medium::diffusive(Grid grid, std::vector<double> sigma_a, const ScatteringKernel& kernel,
                         double knudsen, bool conservative) {
  if (!(knudsen > 0.0)) throw ArgumentError("Knudsen number must be positive");
  if (sigma_a.size() != static_cast<std::size_t>(grid.spatial_count()))
    throw ArgumentError("sigma_a does not match the grid");
  // sigma_nu = c_0 on uniform ordinates (higher harmonics integrate to zero).
  std::vector<double> sigma(sigma_a.size());
  for (std::size_t s = 0; s < sigma.size(); ++s)
    sigma[s] = knudsen * sigma_a[s] + kernel.coefficient(static_cast<int>(s), 0) / knudsen;
  MediumOptions opts;
  opts.knudsen = knudsen;
  opts.conservative = conservative;
  Medium m(std::move(grid), std::move(sigma), kernel.scaled(1.0 / knudsen), opts);
  m.sigma_a_ = std::move(sigma_a);
  return m;
}

void Medium::build_tables() {
  const int nv = grid_.nv();
  const int terms = kernel_.terms();
  cos_.assign(static_cast<std::size_t>(terms * nv), 0.0);
  sin_.assign(static_cast<std::size_t>(terms * nv), 0.0);
  for (int p = 0; p < terms; ++p)
    for (int j = 0; j < nv; ++j) {
      const double a = p * grid_.angle(j);
      cos_[static_cast<std::size_t>(p * nv + j)] = std::cos(a);
      sin_[static_cast<std::size_t>(p * nv + j)] = std::sin(a);
    }
}

double Medium::k(int s, int i, int j) const {
  const int nv = grid_.nv();
  double acc = 0.0;
  for (int p = 0; p < kernel_.terms(); ++p) {
    const auto pi = static_cast<std::size_t>(p * nv + i);
    const auto pj = static_cast<std::size_t>(p * nv + j);
    acc += kernel_.coefficient(s, p) * (cos_[pi] * cos_[pj] + sin_[pi] * sin_[pj]);
  }
  return acc / grid_.velocity_measure();
}

double Medium::sigma_nu(int s, int i) const {
  double acc = 0.0;
  for (int j = 0; j < grid_.nv(); ++j) acc += k(s, i, j) * grid_.weight(j);
  return acc;
}

void Medium::validate() {
  const int ns = grid_.spatial_count();
  const int nv = grid_.nv();
  for (int s = 0; s < ns; ++s)
    if (!(sigma_[static_cast<std::size_t>(s)] >= 0.0))
      throw AdmissibilityError("sigma is negative at node " + std::to_string(s));

  // Uniform ordinates: k(s, i, j) only depends on j - i, so row 0 covers all pairs.
  double kmin = std::numeric_limits<double>::infinity();
  double kmax = 0.0;
  double scale = 0.0;
  for (int s = 0; s < ns; ++s) {
    scale = std::max(scale, std::abs(kernel_.coefficient(s, 0)));
    for (int j = 0; j < nv; ++j) {
      const double v = k(s, 0, j);
      kmin = std::min(kmin, v);
      kmax = std::max(kmax, v);
    }
  }
  if (kmin < -1e-12 * std::max(scale, 1.0))
    throw AdmissibilityError("scattering kernel is negative somewhere (min " +
                             std::to_string(kmin) + ")");
  kernel_bound_ = kmax;

  double worst = std::numeric_limits<double>::infinity();
  int worst_s = 0;
  for (int s = 0; s < ns; ++s) {
    // Rotation invariance makes sigma_nu independent of the ordinate.
    const double m = sigma_[static_cast<std::size_t>(s)] - sigma_nu(s, 0);
    if (m < worst) {
      worst = m;
      worst_s = s;
    }
  }
  margin_ = worst;
  const double slack = 1e-12 * std::max(1.0, *std::max_element(sigma_.begin(), sigma_.end()));
  const bool ok = opts_.conservative ? worst >= -slack : worst > 0.0;
  if (!ok) {
    const Vec2 x = grid_.node(worst_s);
    std::ostringstream msg;
    msg << "medium is not admissible: sigma - int k dv' = " << worst << " at node " << worst_s
        << " (" << x.x << ", " << x.y << ")";
    throw AdmissibilityError(msg.str());
  }
  if (opts_.conservative) margin_ = std::max(margin_, 0.0);
}

double Medium::sigma_at(Vec2 p) const {
  if (opts_.sigma_fn) return opts_.sigma_fn(p);
  return interpolate_nodal(grid_, sigma_, p);
}

double Medium::coefficient_at(Vec2 p, int order) const {
  if (order > kernel_.order()) return 0.0;
  const int n = grid_.nx();
  const double fx = std::clamp(p.x, 0.0, 1.0) * n;
  const double fy = std::clamp(p.y, 0.0, 1.0) * n;
  const int i = std::min(static_cast<int>(fx), n - 1);
  const int k = std::min(static_cast<int>(fy), n - 1);
  const double ax = fx - i, ay = fy - k;
  auto c = [&](int ix, int iy) { return kernel_.coefficient(grid_.node_index(ix, iy), order); };
  return (1 - ax) * (1 - ay) * c(i, k) + ax * (1 - ay) * c(i + 1, k) + (1 - ax) * ay * c(i, k + 1) +
         ax * ay * c(i + 1, k + 1);
}

double validate_admissible(const Medium& m) {
  // Media are checked on construction and immutable afterwards.
  return m.margin();
}

double scattering_integral(const Medium& m, const PhaseField& f, int s, int i) {
  if (!f.matches(m.grid())) throw ArgumentError("phase field does not match the medium grid");
  double acc = 0.0;
  for (int j = 0; j < m.grid().nv(); ++j) acc += m.k(s, i, j) * f(s, j) * m.grid().weight(j);
  return acc;
}

double interpolate_nodal(const Grid& grid, const std::vector<double>& values, Vec2 p) {
  const int n = grid.nx();
  const double fx = std::clamp(p.x, 0.0, 1.0) * n;
  const int i = std::min(static_cast<int>(fx), n - 1);
  const double ax = fx - i;
  if (!grid.is_square()) {
    return (1 - ax) * values[static_cast<std::size_t>(i)] + ax * values[static_cast<std::size_t>(i + 1)];
  }
  const double fy = std::clamp(p.y, 0.0, 1.0) * n;
  const int k = std::min(static_cast<int>(fy), n - 1);
  const double ay = fy - k;
  auto v = [&](int ix, int iy) { return values[static_cast<std::size_t>(grid.node_index(ix, iy))]; };
  return (1 - ax) * (1 - ay) * v(i, k) + ax * (1 - ay) * v(i + 1, k) + (1 - ax) * ay * v(i, k + 1) +
         ax * ay * v(i + 1, k + 1);
}

Phantom::Phantom(PhantomSpec spec) : spec_(std::move(spec)) {
  if (spec_.kind != "constant" && spec_.kind != "smooth-bump" && spec_.kind != "two-inclusion")
    throw ArgumentError("unknown phantom '" + spec_.kind +
                        "' (expected constant, smooth-bump or two-inclusion)");
  if (spec_.kind != "constant" && !(spec_.width > 0.0))
    throw ArgumentError("phantom width must be positive");
  if (spec_.kind == "two-inclusion" && !(spec_.width2 > 0.0))
    throw ArgumentError("phantom width2 must be positive");
}

double Phantom::sigma(Vec2 p) const {
  double s = spec_.sigma0;
  if (spec_.kind == "smooth-bump") {
    const double r = (p - spec_.center).norm() / spec_.width;
    s += spec_.amplitude * std::exp(-r * r);
  } else if (spec_.kind == "two-inclusion") {
    s += spec_.amplitude * bump_psi((p - spec_.center).norm() / spec_.width);
    s += spec_.amplitude2 * bump_psi((p - spec_.center2).norm() / spec_.width2);
  }
  return s;
}

double Phantom::kappa(Vec2) const { return spec_.kappa; }

std::vector<double> Phantom::sample_sigma(const Grid& grid) const {
  std::vector<double> out(static_cast<std::size_t>(grid.spatial_count()));
  for (int s = 0; s < grid.spatial_count(); ++s) out[static_cast<std::size_t>(s)] = sigma(grid.node(s));
  return out;
}

ScatteringKernel Phantom::kernel(const Grid& grid) const {
  const int order = static_cast<int>(spec_.anisotropy.size());
  ScatteringKernel k(grid.spatial_count(), order);
  for (int s = 0; s < grid.spatial_count(); ++s) {
    const double c0 = kappa(grid.node(s));
    k.coefficient(s, 0) = c0;
    for (int p = 1; p <= order; ++p) k.coefficient(s, p) = c0 * spec_.anisotropy[static_cast<std::size_t>(p - 1)];
  }
  return k;
}

Medium Phantom::build(const Grid& grid) const {
  MediumOptions opts;
  opts.sigma_fn = [ph = *this](Vec2 p) { return ph.sigma(p); };
  return Medium(grid, sample_sigma(grid), kernel(grid), std::move(opts));
}

void write_medium(std::ostream& out, const Medium& m) {
  const Grid& g = m.grid();
  const auto old = out.precision(17);
  out << "rte-medium 1\n";
  out << g.nx() << ' ' << g.nv() << ' ' << m.kernel().order() << ' ' << m.knudsen() << ' '
      << (m.conservative() ? 1 : 0) << '\n';
  for (int s = 0; s < g.spatial_count(); ++s) {
    out << m.sigma(s);
    for (int p = 0; p <= m.kernel().order(); ++p) out << ' ' << m.kernel().coefficient(s, p);
    out << '\n';
  }
  out.precision(old);
}

Medium read_medium(std::istream& in, MediumOptions opts) {
  std::string tag;
  int version = 0;
  if (!(in >> tag >> version) || tag != "rte-medium" || version != 1)
    throw ArgumentError("not an rte-medium v1 file");
  int nx = 0, nv = 0, order = 0, conservative = 0;
  double kn = 1.0;
  if (!(in >> nx >> nv >> order >> kn >> conservative)) throw ArgumentError("bad medium header");
  Grid grid = Grid::square(nx, nv);
  std::vector<double> sigma(static_cast<std::size_t>(grid.spatial_count()));
  ScatteringKernel kernel(grid.spatial_count(), order);
  for (int s = 0; s < grid.spatial_count(); ++s) {
    if (!(in >> sigma[static_cast<std::size_t>(s)])) throw ArgumentError("truncated medium file");
    for (int p = 0; p <= order; ++p)
      if (!(in >> kernel.coefficient(s, p))) throw ArgumentError("truncated medium file");
  }
  opts.knudsen = kn;
  opts.conservative = conservative != 0;
  return Medium(std::move(grid), std::move(sigma), std::move(kernel), std::move(opts));
}

}  // namespace rte
