#include "rte/sigma_recovery.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <string>

#include "rte/error.hpp"

namespace rte {

Eigen::RowVectorXd xray_row(const Grid& recon, const Chord& chord) {
  if (chord.count < 2) throw ArgumentError("degenerate chord: fewer than 2 quadrature nodes");
  const int n = recon.nx();
  Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(recon.spatial_count());
  for (int k = 0; k < chord.count; ++k) {
    const double w = chord.spacing * ((k == 0 || k == chord.count - 1) ? 0.5 : 1.0);
    const Vec2 p = chord.point(k);
    const double fx = std::clamp(p.x, 0.0, 1.0) * n;
    const double fy = std::clamp(p.y, 0.0, 1.0) * n;
    const int i = std::clamp(static_cast<int>(std::floor(fx)), 0, n - 1);
    const int q = std::clamp(static_cast<int>(std::floor(fy)), 0, n - 1);
    const double ax = std::clamp(fx - i, 0.0, 1.0);
    const double ay = std::clamp(fy - q, 0.0, 1.0);
    row(recon.node_index(i, q)) += w * (1 - ax) * (1 - ay);
    row(recon.node_index(i + 1, q)) += w * ax * (1 - ay);
    row(recon.node_index(i, q + 1)) += w * (1 - ax) * ay;
    row(recon.node_index(i + 1, q + 1)) += w * ax * ay;
  }
  return row;
}

Eigen::RowVectorXd assemble_xray_row(const Transport& t, const Experiment& exp, const Grid& recon) {
  if (exp.receiver < 0) throw ArgumentError("experiment has no receiver; run extract_components");
  const BoundaryNode& r = t.outflow()[static_cast<std::size_t>(exp.receiver)];
  const Chord c = trace_chord(t.grid(), r.x, t.grid().direction(r.ordinate), t.grid().dx());
  return xray_row(recon, c);
}

RhsResult assemble_rhs(const std::vector<Experiment>& experiments) {
  RhsResult out;
  std::vector<double> vals;
  for (std::size_t i = 0; i < experiments.size(); ++i) {
    const Experiment& e = experiments[i];
    const double r1 = e.reading();
    const double src = e.source_value();
    if (!(r1 > 0.0) || !(src > 0.0)) {
      out.excluded.push_back(static_cast<int>(i));
      continue;
    }
    out.used.push_back(static_cast<int>(i));
    vals.push_back(std::log(src / r1));
  }
  out.a = Eigen::Map<Eigen::VectorXd>(vals.data(), static_cast<Eigen::Index>(vals.size()));
  return out;
}

XRaySystem assemble_system(const Transport& t, const std::vector<Experiment>& experiments,
                           const Grid& recon) {
  XRaySystem sys;
  RhsResult rhs = assemble_rhs(experiments);
  sys.a = rhs.a;
  sys.used = rhs.used;
  sys.excluded = rhs.excluded;
  sys.R.resize(static_cast<Eigen::Index>(sys.used.size()), recon.spatial_count());
  for (std::size_t r = 0; r < sys.used.size(); ++r)
    sys.R.row(static_cast<Eigen::Index>(r)) =
        assemble_xray_row(t, experiments[static_cast<std::size_t>(sys.used[r])], recon);
  return sys;
}

namespace {

// One Cholesky solve plus a refinement sweep.
Eigen::VectorXd spd_solve(const Eigen::MatrixXd& M, const Eigen::VectorXd& b) {
  Eigen::LLT<Eigen::MatrixXd> llt(M);
  if (llt.info() != Eigen::Success)
    throw ArgumentError("normal equations are singular; use lambda > 0");
  Eigen::VectorXd x = llt.solve(b);
  x += llt.solve(b - M * x);
  return x;
}

}  // namespace

Eigen::VectorXd tikhonov_solve(const Eigen::MatrixXd& R, const Eigen::VectorXd& a, double lambda) {
  if (!(lambda >= 0.0)) throw ArgumentError("lambda must be nonnegative");
  if (R.rows() != a.size()) throw ArgumentError("R and a disagree on the number of rows");
  const Eigen::VectorXd rhs = R.transpose() * a;
  Eigen::VectorXd sigma;
  if (R.rows() >= R.cols()) {
    Eigen::MatrixXd M = R.transpose() * R;
    M.diagonal().array() += lambda;
    sigma = spd_solve(M, rhs);
  } else {
    if (lambda == 0.0) throw ArgumentError("R^T R is singular (more unknowns than rows); use lambda > 0");
    Eigen::MatrixXd M = R * R.transpose();
    M.diagonal().array() += lambda;
    sigma = R.transpose() * spd_solve(M, a);
  }
  if (lambda == 0.0) {
    // Cholesky can succeed on a numerically singular matrix; the residual tells.
    const Eigen::VectorXd res = R.transpose() * (R * sigma) - rhs;
    if (res.norm() > 1e-10 * std::max(rhs.norm(), 1e-300))
      throw ArgumentError("normal equations are numerically singular at lambda = 0; use lambda > 0");
  }
  return sigma;
}

const Eigen::VectorXd& tikhonov_solve(XRaySystem& sys) {
  sys.sigma = tikhonov_solve(sys.R, sys.a, sys.lambda);
  return sys.sigma;
}

double tikhonov_objective(const Eigen::MatrixXd& R, const Eigen::VectorXd& a, double lambda,
                          const Eigen::VectorXd& sigma) {
  return (R * sigma - a).squaredNorm() + lambda * sigma.squaredNorm();
}

double lambda_from_theorem(double eps, double eps1, double delta, double dx, double z_norm) {
  if (!(eps > 0.0 && eps1 > 0.0 && delta > 0.0 && dx > 0.0))
    throw ArgumentError("lambda_from_theorem needs positive eps, eps1, delta, dx");
  if (!(z_norm > 0.0)) throw ArgumentError("range certificate norm must be positive");
  return (std::pow(eps1, -2.0 - delta) * std::pow(eps, 4) + dx * dx) / z_norm;
}

DiscrepancyResult discrepancy_lambda(const Eigen::MatrixXd& R, const Eigen::VectorXd& a,
                                     double noise_norm, double tau, double lambda_min,
                                     double lambda_max) {
  if (!(noise_norm >= 0.0) || !(tau > 0.0)) throw ArgumentError("bad discrepancy target");
  if (!(lambda_min > 0.0 && lambda_max > lambda_min)) throw ArgumentError("bad lambda bracket");
  DiscrepancyResult out;
  out.target = tau * noise_norm;
  auto residual = [&](double lam) {
    ++out.evaluations;
    return (R * tikhonov_solve(R, a, lam) - a).norm();
  };
  double lo = std::log(lambda_min), hi = std::log(lambda_max);
  const double r_lo = residual(lambda_min);
  if (r_lo >= out.target) {
    out.lambda = lambda_min;
    out.residual = r_lo;
    out.bracketed = false;
    return out;
  }
  const double r_hi = residual(lambda_max);
  if (r_hi <= out.target) {
    out.lambda = lambda_max;
    out.residual = r_hi;
    out.bracketed = false;
    return out;
  }
  // The residual grows monotonically with lambda.
  for (int it = 0; it < 80 && hi - lo > 1e-6; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (residual(std::exp(mid)) < out.target)
      lo = mid;
    else
      hi = mid;
  }
  out.lambda = std::exp(0.5 * (lo + hi));
  out.residual = residual(out.lambda);
  return out;
}

double separation_noise(const Transport& t, const Experiment& exp) {
  const Grid& g = t.grid();
  const BoundaryManifold& out = t.outflow();
  const BoundaryNode& rcv = out[static_cast<std::size_t>(exp.receiver)];
  const Vec2 v0 = g.direction(rcv.ordinate);
  const Vec2 perp{-v0.y, v0.x};
  const double footprint =
      (exp.source.delta || exp.source.epsilon < g.dx() ? 0.0 : exp.source.epsilon) + 2.0 * g.dx();
  double best[2] = {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  double value[2] = {0.0, 0.0};
  for (std::size_t b = 0; b < out.size(); ++b) {
    if (out[b].ordinate != rcv.ordinate) continue;
    // The beam is at most 2 eps wide across v0, however obliquely it meets the wall.
    const double across = (out[b].x - exp.counterpart).dot(perp);
    if (std::abs(across) < footprint) continue;
    const int side = across >= 0.0 ? 0 : 1;
    if (std::abs(across) < best[side]) {
      best[side] = std::abs(across);
      value[side] = exp.phi[b];
    }
  }
  int found = 0;
  double background = 0.0;
  for (int s = 0; s < 2; ++s)
    if (std::isfinite(best[s])) {
      background += value[s];
      ++found;
    }
  if (found == 0 || !(exp.reading() > 0.0)) return 0.0;
  return (background / found) / exp.reading();
}

RangeCertificate range_certificate(const Eigen::MatrixXd& R, const Eigen::VectorXd& truth) {
  if (R.cols() != truth.size()) throw ArgumentError("truth does not match R");
  RangeCertificate c;
  const Eigen::MatrixXd Rt = R.transpose();
  c.z = Rt.completeOrthogonalDecomposition().solve(truth);
  c.residual = (Rt * c.z - truth).norm();
  c.relative_residual = c.residual / std::max(truth.norm(), 1e-300);
  return c;
}

double smallest_singular_value(const Eigen::MatrixXd& R) {
  if (R.size() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(R);
  const auto& s = svd.singularValues();
  // Columns beyond the row count are a null space of their own.
  if (R.cols() > R.rows()) return 0.0;
  return s(s.size() - 1);
}

ErrorReport error_report(const Eigen::VectorXd& sigma, const Eigen::VectorXd& truth) {
  if (sigma.size() != truth.size()) throw ArgumentError("error_report: size mismatch");
  ErrorReport r;
  const Eigen::VectorXd d = sigma - truth;
  r.l2 = d.norm();
  r.relative_l2 = r.l2 / std::max(truth.norm(), 1e-300);
  r.max = d.size() ? d.cwiseAbs().maxCoeff() : 0.0;
  return r;
}

double Sinogram::angle(int i) const { return first_angle + std::numbers::pi * i / n_angles; }

double Sinogram::offset(int k) const { return -extent + (k + 0.5) * spacing(); }

FbpResult fbp_reconstruct(const Sinogram& sino, const Grid& grid) {
  if (sino.n_angles < 1 || sino.n_offsets < 2) throw ArgumentError("sinogram too small");
  if (sino.values.size() != static_cast<std::size_t>(sino.n_angles * sino.n_offsets))
    throw ArgumentError("sinogram size does not match its header");
  FbpResult res;
  res.few_angles = sino.n_angles < 8;
  const int no = sino.n_offsets;
  const double d = sino.spacing();

  // Ram-Lak kernel sampled at the detector spacing.
  std::vector<double> h(static_cast<std::size_t>(2 * no - 1), 0.0);
  for (int m = -(no - 1); m <= no - 1; ++m) {
    double v = 0.0;
    if (m == 0)
      v = 1.0 / (4.0 * d * d);
    else if (m % 2 != 0)
      v = -1.0 / (m * m * std::numbers::pi * std::numbers::pi * d * d);
    h[static_cast<std::size_t>(m + no - 1)] = v;
  }
  std::vector<double> q(static_cast<std::size_t>(sino.n_angles * no), 0.0);
  for (int i = 0; i < sino.n_angles; ++i)
    for (int k = 0; k < no; ++k) {
      double acc = 0.0;
      for (int m = 0; m < no; ++m) acc += h[static_cast<std::size_t>(k - m + no - 1)] * sino.at(i, m);
      q[static_cast<std::size_t>(i * no + k)] = d * acc;
    }

  res.image.assign(static_cast<std::size_t>(grid.spatial_count()), 0.0);
  const double dtheta = std::numbers::pi / sino.n_angles;
  for (int s = 0; s < grid.spatial_count(); ++s) {
    const Vec2 p = grid.node(s) - Vec2{0.5, 0.5};
    double acc = 0.0;
    for (int i = 0; i < sino.n_angles; ++i) {
      const double th = sino.angle(i);
      const double u = (p.x * std::cos(th) + p.y * std::sin(th) + sino.extent) / d - 0.5;
      const int k = static_cast<int>(std::floor(u));
      const double a = u - k;
      auto val = [&](int kk) {
        return (kk < 0 || kk >= no) ? 0.0 : q[static_cast<std::size_t>(i * no + kk)];
      };
      acc += (1.0 - a) * val(k) + a * val(k + 1);
    }
    res.image[static_cast<std::size_t>(s)] = acc * dtheta;
  }
  return res;
}

void write_sinogram(std::ostream& out, const Sinogram& sino) {
  const auto old = out.precision(17);
  out << sino.n_angles << ' ' << sino.n_offsets << ' ' << sino.extent << ' ' << sino.first_angle
      << '\n';
  for (int i = 0; i < sino.n_angles; ++i) {
    for (int k = 0; k < sino.n_offsets; ++k) out << (k ? " " : "") << sino.at(i, k);
    out << '\n';
  }
  out.precision(old);
}

Sinogram read_sinogram(std::istream& in) {
  Sinogram s;
  if (!(in >> s.n_angles >> s.n_offsets >> s.extent >> s.first_angle) || s.n_angles < 1 ||
      s.n_offsets < 1 || !(s.extent > 0.0))
    throw ArgumentError("bad sinogram header");
  s.values.resize(static_cast<std::size_t>(s.n_angles * s.n_offsets));
  for (double& v : s.values)
    if (!(in >> v)) throw ArgumentError("truncated sinogram");
  return s;
}

}  // namespace rte
