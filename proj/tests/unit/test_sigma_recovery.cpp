#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "../support/svd_oracle.hpp"
#include "rte/error.hpp"
#include "rte/sigma_recovery.hpp"

using namespace rte;

TEST(XRayRow, ExactForLinearFields) {
  // Bilinear interpolation and the trapezoid rule are both exact for linear sigma.
  const Grid recon = Grid::square(4, 1);
  const Grid fine = Grid::square(32, 1);
  Eigen::VectorXd sig(recon.spatial_count());
  for (int s = 0; s < recon.spatial_count(); ++s) sig(s) = 0.5 + 2.0 * recon.node(s).x - recon.node(s).y;
  for (double th : {0.3, 1.1, 2.0, 3.9, 5.5}) {
    const Vec2 v{std::cos(th), std::sin(th)};
    const Vec2 mid{0.45, 0.55};
    const Vec2 p = mid + v * exit_time(fine, mid, v, Sign::Plus);
    const Chord c = trace_chord(fine, p, v, fine.dx());
    const Vec2 q = c.foot();
    auto lin = [](Vec2 z) { return 0.5 + 2.0 * z.x - z.y; };
    const double exact = 0.5 * (lin(p) + lin(q)) * c.length;
    EXPECT_NEAR(xray_row(recon, c).dot(sig), exact, 1e-12);
  }
}

TEST(XRayRow, RejectsDegenerateChords) {
  const Grid g = Grid::square(4, 1);
  Chord c;
  c.origin = {0.0, 0.5};
  c.direction = {1.0, 0.0};
  EXPECT_THROW(xray_row(g, c), ArgumentError);
}

TEST(Tikhonov, MatchesSpectralFormula) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (auto [rows, cols] : {std::pair{30, 10}, std::pair{10, 30}, std::pair{12, 12}})
    for (double lambda : {1e-6, 1e-2, 1.0}) {
      Eigen::MatrixXd R(rows, cols);
      Eigen::VectorXd a(rows);
      for (int i = 0; i < rows; ++i) {
        a(i) = u(rng);
        for (int j = 0; j < cols; ++j) R(i, j) = u(rng);
      }
      const Eigen::VectorXd ref = rte::testing::tikhonov_by_svd(R, a, lambda);
      const Eigen::VectorXd got = tikhonov_solve(R, a, lambda);
      EXPECT_LE((got - ref).norm() / ref.norm(), 1e-10) << rows << "x" << cols << " " << lambda;
    }
}

TEST(Tikhonov, UnregularizedSquareSystemIsExact) {
  Eigen::MatrixXd R(3, 3);
  R << 2, 1, 0, 1, 3, 1, 0, 1, 4;
  const Eigen::VectorXd x{{1.0, -2.0, 0.5}};
  const Eigen::VectorXd a = R * x;
  EXPECT_LE((tikhonov_solve(R, a, 0.0) - x).norm(), 1e-12);
  EXPECT_THROW(tikhonov_solve(Eigen::MatrixXd::Ones(2, 3), Eigen::VectorXd::Ones(2), 0.0),
               ArgumentError);
  EXPECT_THROW(tikhonov_solve(Eigen::MatrixXd::Ones(3, 2), Eigen::VectorXd::Ones(3), 0.0),
               ArgumentError);
  EXPECT_THROW(tikhonov_solve(R, a, -1.0), ArgumentError);
}

TEST(Tikhonov, ObjectiveIsMinimal) {
  std::mt19937 rng(3);
  std::normal_distribution<double> n;
  Eigen::MatrixXd R(15, 6);
  Eigen::VectorXd a(15);
  for (int i = 0; i < 15; ++i) {
    a(i) = n(rng);
    for (int j = 0; j < 6; ++j) R(i, j) = n(rng);
  }
  const Eigen::VectorXd x = tikhonov_solve(R, a, 0.1);
  const double f0 = tikhonov_objective(R, a, 0.1, x);
  for (int k = 0; k < 6; ++k) {
    Eigen::VectorXd y = x;
    y(k) += 1e-3;
    EXPECT_GT(tikhonov_objective(R, a, 0.1, y), f0);
  }
}

TEST(Lambda, TheoremFormula) {
  const double l = lambda_from_theorem(0.1, 0.2, 0.1, 0.05, 2.0);
  EXPECT_NEAR(l, (std::pow(0.2, -2.1) * 1e-4 + 0.0025) / 2.0, 1e-15);
}

TEST(Lambda, DiscrepancyHitsTarget) {
  std::mt19937 rng(11);
  std::normal_distribution<double> n;
  Eigen::MatrixXd R(40, 10);
  Eigen::VectorXd a(40);
  for (int i = 0; i < 40; ++i) {
    a(i) = n(rng);
    for (int j = 0; j < 10; ++j) R(i, j) = n(rng);
  }
  const double floor = (R * tikhonov_solve(R, a, 1e-14) - a).norm();
  // Any target between the least-squares floor and ||a|| is reachable.
  const double target = 0.5 * (floor + a.norm());
  const DiscrepancyResult d = discrepancy_lambda(R, a, target);
  EXPECT_TRUE(d.bracketed);
  EXPECT_NEAR(d.residual, target, 1e-6 * floor);
  EXPECT_NEAR((R * tikhonov_solve(R, a, d.lambda) - a).norm(), d.residual, 1e-9 * floor);
  const DiscrepancyResult low = discrepancy_lambda(R, a, 0.5 * floor);
  EXPECT_FALSE(low.bracketed);
  EXPECT_DOUBLE_EQ(low.lambda, 1e-14);
}

TEST(Diagnostics, RangeCertificateAndSingularValues) {
  std::mt19937 rng(5);
  std::normal_distribution<double> n;
  Eigen::MatrixXd R(20, 8);
  for (int i = 0; i < 20; ++i)
    for (int j = 0; j < 8; ++j) R(i, j) = n(rng);
  Eigen::VectorXd z(20);
  for (int i = 0; i < 20; ++i) z(i) = n(rng);
  const RangeCertificate c = range_certificate(R, R.transpose() * z);
  EXPECT_LT(c.relative_residual, 1e-12);
  // smallest singular value through the eigenvalues of R^T R
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(R.transpose() * R);
  EXPECT_NEAR(smallest_singular_value(R), std::sqrt(es.eigenvalues().minCoeff()), 1e-10);
  EXPECT_EQ(smallest_singular_value(R.transpose()), 0.0);
  const ErrorReport e = error_report(Eigen::VectorXd::Constant(4, 1.1), Eigen::VectorXd::Ones(4));
  EXPECT_NEAR(e.relative_l2, 0.1, 1e-14);
  EXPECT_NEAR(e.max, 0.1, 1e-14);
}

TEST(Rhs, LogRatioAndExclusions) {
  PhantomSpec ps;
  ps.sigma0 = 0.8;
  ps.kappa = 0.0;
  const Transport t(Phantom(ps).build(Grid::square(16, 16)));
  const int a = find_anchor(t.inflow(), {0.0, 0.5}, 0);
  std::vector<Experiment> ex{run_experiment(t, {a, 0.0, true})};
  ex.push_back(ex.front());
  ex.back().phi[static_cast<std::size_t>(ex.back().receiver)] = 0.0;
  const RhsResult r = assemble_rhs(ex);
  ASSERT_EQ(r.used.size(), 1u);
  ASSERT_EQ(r.excluded.size(), 1u);
  EXPECT_NEAR(r.a(0), 0.8, 1e-12);  // ln(1 / exp(-0.8))
  // no scattering: nothing outside the ballistic footprint
  EXPECT_EQ(separation_noise(t, ex.front()), 0.0);
}

TEST(Sinogram, RoundTripAndGeometry) {
  Sinogram s;
  s.n_angles = 3;
  s.n_offsets = 4;
  s.extent = 0.6;
  s.first_angle = 0.25;
  for (int i = 0; i < 12; ++i) s.values.push_back(0.1 * i + 1.0 / 3.0);
  std::stringstream io;
  write_sinogram(io, s);
  const Sinogram b = read_sinogram(io);
  EXPECT_EQ(b.n_angles, 3);
  EXPECT_DOUBLE_EQ(b.extent, 0.6);
  EXPECT_DOUBLE_EQ(b.first_angle, 0.25);
  for (int i = 0; i < 12; ++i) EXPECT_DOUBLE_EQ(b.values[static_cast<std::size_t>(i)], s.values[static_cast<std::size_t>(i)]);
  EXPECT_NEAR(s.offset(0), -0.45, 1e-15);
  EXPECT_NEAR(s.angle(1), 0.25 + std::numbers::pi / 3.0, 1e-15);
  std::stringstream bad("2 2 0.5");
  EXPECT_THROW(read_sinogram(bad), ArgumentError);
}

TEST(Fbp, ReconstructsAGaussian) {
  // Projection of exp(-r^2 / w^2) is sqrt(pi) w exp(-t^2 / w^2) for every angle.
  const double w = 0.15;
  Sinogram s;
  s.n_angles = 90;
  s.n_offsets = 128;
  s.extent = 0.75;
  for (int i = 0; i < s.n_angles; ++i)
    for (int k = 0; k < s.n_offsets; ++k) {
      const double t = s.offset(k);
      s.values.push_back(std::sqrt(std::numbers::pi) * w * std::exp(-t * t / (w * w)));
    }
  const Grid g = Grid::square(20, 1);
  const FbpResult r = fbp_reconstruct(s, g);
  EXPECT_FALSE(r.few_angles);
  double err = 0.0;
  for (int q = 0; q < g.spatial_count(); ++q) {
    const double rr = (g.node(q) - Vec2{0.5, 0.5}).norm();
    err = std::max(err, std::abs(r.image[static_cast<std::size_t>(q)] - std::exp(-rr * rr / (w * w))));
  }
  EXPECT_LT(err, 0.03);
  s.n_angles = 4;
  s.values.resize(4 * 128);
  EXPECT_TRUE(fbp_reconstruct(s, g).few_angles);
}
