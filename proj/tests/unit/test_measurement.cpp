#include <gtest/gtest.h>

#include <cmath>

#include "rte/error.hpp"
#include "rte/measurement.hpp"
#include "rte/profile.hpp"

using namespace rte;

namespace {

Transport constant_transport(int nx, int nv, double sigma, double kappa) {
  PhantomSpec ps;
  ps.sigma0 = sigma;
  ps.kappa = kappa;
  return Transport(Phantom(ps).build(Grid::square(nx, nv)));
}

}  // namespace

TEST(Profile, CutoffShape) {
  EXPECT_EQ(bump_psi(0.0), 1.0);
  EXPECT_EQ(bump_psi(0.5), 1.0);
  EXPECT_EQ(bump_psi(1.0), 0.0);
  EXPECT_EQ(bump_psi(-0.3), 1.0);
  EXPECT_NEAR(bump_psi(0.75), 0.5, 1e-15);
  for (double r = 0.5; r < 1.0; r += 0.01) EXPECT_GE(bump_psi(r), bump_psi(r + 0.01));
  // C^2 at both joins: second differences vanish as h -> 0
  const double h = 1e-4;
  for (double r : {0.5, 1.0}) {
    const double d2 = (bump_psi(r + h) - 2.0 * bump_psi(r) + bump_psi(r - h)) / (h * h);
    EXPECT_LT(std::abs(d2), 1e-1);
  }
}

TEST(Source, ConcentratedProfile) {
  const Transport t = constant_transport(16, 16, 1.0, 0.2);
  const Grid& g = t.grid();
  const int a = find_anchor(t.inflow(), {0.0, 0.5}, 0);
  const BoundaryField f = make_source(g, t.inflow(), {a, 0.25, false});
  EXPECT_EQ(f[static_cast<std::size_t>(a)], 1.0);
  for (std::size_t b = 0; b < f.size(); ++b) {
    const BoundaryNode& n = t.inflow()[b];
    const double r = (n.x - Vec2{0.0, 0.5}).norm() / 0.25;
    const double w = (g.direction(n.ordinate) - g.direction(0)).norm() / 0.25;
    EXPECT_NEAR(f[b], bump_psi(r) * bump_psi(w), 1e-15);
  }
  const BoundaryField spike = make_source(g, t.inflow(), {a, 0.25, true});
  double total = 0.0;
  for (double v : spike.values) total += v;
  EXPECT_EQ(total, 1.0);
  EXPECT_THROW(find_anchor(t.inflow(), {0.0, 0.51}, 0), ArgumentError);
  EXPECT_THROW(find_anchor(t.inflow(), {1.0, 0.5}, 0), ArgumentError);
}

TEST(Experiment, ComponentsPartitionTheData) {
  const Transport t = constant_transport(16, 16, 1.0, 0.3);
  const int a = find_anchor(t.inflow(), {0.0, 0.5}, 0);
  const Experiment e = run_experiment(t, {a, 0.25, false});
  EXPECT_NEAR(e.counterpart.x, 1.0, 1e-14);
  EXPECT_NEAR(e.counterpart.y, 0.5, 1e-14);
  EXPECT_EQ(e.snap_distance, 0.0);
  int scatter = 0;
  for (std::size_t b = 0; b < e.phi.size(); ++b) {
    EXPECT_DOUBLE_EQ(e.r1[b] + e.r2[b] + e.r3[b], e.phi[b]);
    scatter += e.scatter_mask[b];
  }
  EXPECT_GT(scatter, 0);
  // Beer-Lambert along the unit chord at the receiver.
  EXPECT_NEAR(e.ballistic_reading(), std::exp(-1.0), 1e-12);
  EXPECT_GT(e.reading(), e.ballistic_reading());
}

TEST(Readout, DegenerateWindowReadsTheReceiver) {
  const Transport t = constant_transport(16, 16, 1.0, 0.3);
  const int a = find_anchor(t.inflow(), {0.0, 0.5}, 0);
  const Experiment e = run_experiment(t, {a, 0.25, false});
  const MollifiedReadout r = mollified_functionals(t, e, 0.01);
  EXPECT_TRUE(r.degenerate);
  const auto rcv = static_cast<std::size_t>(e.receiver);
  EXPECT_DOUBLE_EQ(r.e1, t.outflow()[rcv].weight * e.phi1[rcv]);
  EXPECT_THROW(mollified_functionals(t, e, 0.0), ArgumentError);
}

TEST(Readout, BallisticFunctionalGrowsWithSourceWidth) {
  // The source profile increases pointwise with eps, and so does its ballistic image.
  const Transport t = constant_transport(16, 64, 1.0, 0.3);
  const int a = find_anchor(t.inflow(), {0.0, 0.5}, 0);
  const double eps1 = 0.125;
  const double e_a = mollified_functionals(t, run_experiment(t, {a, 0.25, false}), eps1).e1;
  const double e_b = mollified_functionals(t, run_experiment(t, {a, 0.5, false}), eps1).e1;
  EXPECT_GT(e_a, 0.0);
  EXPECT_GE(e_b, e_a);
}

TEST(Design, ChordsRespectTheFootTolerance) {
  const Transport t = constant_transport(32, 30, 1.0, 0.2);
  const double tol = 0.04;
  const BeamDesign d = design_parallel_beam(t, 15, 6, 0.6, tol);
  EXPECT_EQ(static_cast<int>(d.chords.size()) + d.rejected, 90);
  EXPECT_GT(d.chords.size(), 60u);
  for (const DesignedChord& c : d.chords) {
    EXPECT_LE(c.foot_offset, tol + 1e-12);
    EXPECT_EQ(c.ordinate, c.angle_index);  // nv = 2 * angles
    EXPECT_EQ(t.inflow()[static_cast<std::size_t>(c.anchor)].ordinate, c.ordinate);
    EXPECT_EQ(t.outflow()[static_cast<std::size_t>(c.receiver)].ordinate, c.ordinate);
  }
  EXPECT_THROW(design_parallel_beam(t, 0, 6, 0.6, tol), ArgumentError);
}
