#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "rte/error.hpp"
#include "rte/medium.hpp"

using namespace rte;

TEST(Kernel, IsotropicRateIsKappa) {
  const Grid g = Grid::square(4, 16);
  const Medium m(g, std::vector<double>(25, 1.0), ScatteringKernel::isotropic(25, 0.3));
  for (int s = 0; s < 25; s += 6)
    for (int i = 0; i < g.nv(); i += 5) EXPECT_NEAR(m.sigma_nu(s, i), 0.3, 1e-14);
  EXPECT_NEAR(m.margin(), 0.7, 1e-14);
  EXPECT_NEAR(m.k(0, 0, 3), 0.3 / (2.0 * M_PI), 1e-15);
}

TEST(Kernel, AnisotropicTermsIntegrateToZero) {
  const Grid g = Grid::square(2, 32);
  ScatteringKernel k(9, 2, std::vector<double>(27, 0.0));
  for (int s = 0; s < 9; ++s) {
    k.coefficient(s, 0) = 0.4;
    k.coefficient(s, 1) = 0.2;
    k.coefficient(s, 2) = 0.1;
  }
  const Medium m(g, std::vector<double>(9, 1.0), k);
  EXPECT_NEAR(m.sigma_nu(4, 7), 0.4, 1e-14);
  // forward peak c0 + c1 + c2
  EXPECT_NEAR(m.k(4, 5, 5) * 2.0 * M_PI, 0.7, 1e-14);
}

TEST(Medium, RejectsInadmissiblePair) {
  const Grid g = Grid::square(2, 8);
  EXPECT_THROW(Medium(g, std::vector<double>(9, 0.5), ScatteringKernel::isotropic(9, 0.5)),
               AdmissibilityError);
  EXPECT_THROW(Medium(g, std::vector<double>(9, 0.5), ScatteringKernel::isotropic(9, 0.6)),
               AdmissibilityError);
  MediumOptions opts;
  opts.conservative = true;
  EXPECT_NO_THROW(Medium(g, std::vector<double>(9, 0.5), ScatteringKernel::isotropic(9, 0.5), opts));
  EXPECT_THROW(Medium(g, std::vector<double>(4, 1.0), ScatteringKernel::isotropic(9, 0.1)),
               ArgumentError);
}

TEST(Medium, DiffusiveScaling) {
  const Grid g = Grid::square(2, 8);
  const double kn = 0.25;
  const Medium m = Medium::diffusive(g, std::vector<double>(9, 0.2),
                                     ScatteringKernel::isotropic(9, 0.5), kn);
  // sigma = Kn sigma_a + sigma_nu / Kn
  EXPECT_NEAR(m.sigma(3), kn * 0.2 + 0.5 / kn, 1e-14);
  EXPECT_NEAR(m.sigma_nu(3, 0), 0.5 / kn, 1e-14);
  EXPECT_DOUBLE_EQ(m.knudsen(), kn);
}

TEST(Medium, InterpolationIsExactForBilinear) {
  const Grid g = Grid::square(5, 4);
  auto f = [](Vec2 p) { return 1.0 + 2.0 * p.x - 3.0 * p.y + 4.0 * p.x * p.y; };
  std::vector<double> v(static_cast<std::size_t>(g.spatial_count()));
  for (int s = 0; s < g.spatial_count(); ++s) v[static_cast<std::size_t>(s)] = f(g.node(s));
  for (Vec2 p : {Vec2{0.13, 0.77}, Vec2{1.0, 0.5}, Vec2{0.0, 0.0}, Vec2{0.61, 0.99}})
    EXPECT_NEAR(interpolate_nodal(g, v, p), f(p), 1e-13);
}

TEST(Phantom, ShapesAndRoundTrip) {
  PhantomSpec ps;
  ps.kind = "smooth-bump";
  const Phantom ph(ps);
  EXPECT_NEAR(ph.sigma({0.5, 0.5}), 1.5, 1e-12);
  EXPECT_NEAR(ph.sigma({0.0, 0.0}), 1.0, 1e-5);
  EXPECT_DOUBLE_EQ(ph.kappa({0.3, 0.3}), 0.2);

  const Grid g = Grid::square(4, 8);
  const Medium m = ph.build(g);
  std::stringstream ss;
  write_medium(ss, m);
  const Medium back = read_medium(ss);
  ASSERT_EQ(back.grid().spatial_count(), g.spatial_count());
  for (int s = 0; s < g.spatial_count(); ++s) {
    EXPECT_DOUBLE_EQ(back.sigma(s), m.sigma(s));
    EXPECT_DOUBLE_EQ(back.kernel().coefficient(s, 0), m.kernel().coefficient(s, 0));
  }
  PhantomSpec bad;
  bad.kind = "nope";
  EXPECT_THROW(Phantom{bad}, ArgumentError);
}
