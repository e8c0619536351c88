#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <optional>
#include <vector>

#include "rte/measurement.hpp"

namespace rte {

// Discrete X-ray system R Sigma ~ a on a nodal reconstruction grid. The
// reconstruction grid is separate from the transport grid so the number of
// unknowns can be matched to the number of chords.
struct XRaySystem {
  Eigen::MatrixXd R;
  Eigen::VectorXd a;
  double lambda = 0.0;
  double delta = 0.1;
  std::optional<Eigen::VectorXd> z;
  Eigen::VectorXd sigma;  // recovered Sigma
  Eigen::VectorXd truth;  // sigma^dis on the reconstruction nodes, empty when unknown
  std::vector<int> used;      // experiment indices behind each row
  std::vector<int> excluded;  // experiments dropped because phi_R1 <= 0
};

// Trapezoid weights of a chord spread onto the nodes of recon by bilinear
// interpolation. Throws ArgumentError for chords with fewer than 2 samples.
Eigen::RowVectorXd xray_row(const Grid& recon, const Chord& chord);

// Row for one experiment: the chord traced back from its receiver node,
// sampled at the transport grid spacing.
Eigen::RowVectorXd assemble_xray_row(const Transport& t, const Experiment& exp, const Grid& recon);

struct RhsResult {
  Eigen::VectorXd a;
  std::vector<int> used;
  std::vector<int> excluded;
};

// a_j = ln(f_-(anchor) / phi_R1); experiments with phi_R1 <= 0 are skipped.
RhsResult assemble_rhs(const std::vector<Experiment>& experiments);

XRaySystem assemble_system(const Transport& t, const std::vector<Experiment>& experiments,
                           const Grid& recon);

// (R^T R + lambda I)^{-1} R^T a by Cholesky. Wide systems use the equivalent
// R^T (R R^T + lambda I)^{-1} a so the factored matrix stays nonsingular.
Eigen::VectorXd tikhonov_solve(const Eigen::MatrixXd& R, const Eigen::VectorXd& a, double lambda);
const Eigen::VectorXd& tikhonov_solve(XRaySystem& sys);

double tikhonov_objective(const Eigen::MatrixXd& R, const Eigen::VectorXd& a, double lambda,
                          const Eigen::VectorXd& sigma);

// (eps1^{-2-delta} eps^4 + dx^2) / ||z||.
double lambda_from_theorem(double eps, double eps1, double delta, double dx, double z_norm);

struct DiscrepancyResult {
  double lambda = 0.0;
  double residual = 0.0;  // ||R Sigma - a||
  double target = 0.0;
  int evaluations = 0;
  bool bracketed = true;  // false when the target lies outside [lambda_min, lambda_max]
};

// lambda with ||R Sigma(lambda) - a|| = tau * noise_norm, by bisection in log lambda.
DiscrepancyResult discrepancy_lambda(const Eigen::MatrixXd& R, const Eigen::VectorXd& a,
                                     double noise_norm, double tau = 1.0,
                                     double lambda_min = 1e-14, double lambda_max = 1e4);

// Relative size of the scattered background under phi_R1, read off outflow
// nodes of the same ordinate just outside the ballistic footprint. This is
// the per-row data error fed to the discrepancy principle.
double separation_noise(const Transport& t, const Experiment& exp);

struct RangeCertificate {
  Eigen::VectorXd z;
  double residual = 0.0;           // ||R^T z - sigma^dis||
  double relative_residual = 0.0;
};

RangeCertificate range_certificate(const Eigen::MatrixXd& R, const Eigen::VectorXd& truth);

double smallest_singular_value(const Eigen::MatrixXd& R);

struct ErrorReport {
  double l2 = 0.0;
  double relative_l2 = 0.0;
  double max = 0.0;
};

ErrorReport error_report(const Eigen::VectorXd& sigma, const Eigen::VectorXd& truth);

// Parallel-beam sinogram: line normals at theta_i = first_angle + pi i / n_angles,
// offsets at cell centres of [-extent, extent], measured from the square's centre.
struct Sinogram {
  int n_angles = 0;
  int n_offsets = 0;
  double extent = 0.7071067811865476;
  double first_angle = 0.0;
  std::vector<double> values;  // row-major, one row per angle

  double angle(int i) const;
  double offset(int k) const;
  double spacing() const { return 2.0 * extent / n_offsets; }
  double& at(int i, int k) { return values[static_cast<std::size_t>(i * n_offsets + k)]; }
  double at(int i, int k) const { return values[static_cast<std::size_t>(i * n_offsets + k)]; }
};

struct FbpResult {
  std::vector<double> image;  // nodal values on the target grid
  bool few_angles = false;    // fewer than 8 angles: expect streaks
};

// Ram-Lak filtered back-projection onto the nodes of grid.
FbpResult fbp_reconstruct(const Sinogram& sino, const Grid& grid);

// Header "n_angles n_offsets extent first_angle", then the values row by row.
void write_sinogram(std::ostream& out, const Sinogram& sino);
Sinogram read_sinogram(std::istream& in);

}  // namespace rte
