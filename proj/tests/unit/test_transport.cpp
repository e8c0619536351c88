#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "rte/error.hpp"
#include "rte/transport.hpp"

using namespace rte;

namespace {

Medium constant_medium(const Grid& g, double sigma, double kappa) {
  const int n = g.spatial_count();
  return Medium(g, std::vector<double>(static_cast<std::size_t>(n), sigma),
                ScatteringKernel::isotropic(n, kappa));
}

PhaseField random_field(const Grid& g, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  PhaseField f(g);
  for (double& v : f.values()) v = u(rng);
  return f;
}

double dot(const PhaseField& a, const PhaseField& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a.values()[i] * b.values()[i];
  return s;
}

}  // namespace

TEST(Transport, InverseOfConstantSourceConvergesToClosedForm) {
  // -int_0^tau exp(-sigma t) g dt = -g (1 - exp(-sigma tau)) / sigma; the
  // trapezoid rule on the chord is second order.
  auto err_at = [](int nx) {
    const Grid g = Grid::square(nx, 12);
    const double sigma = 1.3;
    const Transport t(constant_medium(g, sigma, 0.0));
    const PhaseField u = t.apply_inverse(PhaseField(g, 2.0));
    double sum = 0.0, worst = 0.0;
    for (int j = 0; j < g.nv(); ++j)
      for (int s = 0; s < g.spatial_count(); ++s) {
        const double tau = exit_time(g, g.node(s), g.direction(j), Sign::Minus);
        const double e = std::abs(u(s, j) + 2.0 * (1.0 - std::exp(-sigma * tau)) / sigma);
        sum += e;
        worst = std::max(worst, e);
      }
    return std::pair{sum / static_cast<double>(g.phase_size()), worst};
  };
  const auto [m16, x16] = err_at(16);
  const auto [m32, x32] = err_at(32);
  EXPECT_LT(x32, 1e-3);
  EXPECT_GT(std::log2(x16 / x32), 1.8);
  EXPECT_GT(std::log2(m16 / m32), 1.8);
}

TEST(Transport, LiftAttenuatesAlongChords) {
  const Grid g = Grid::square(8, 12);
  const double sigma = 0.7;
  const Transport t(constant_medium(g, sigma, 0.0));
  const PhaseField f = t.lift(t.boundary(Side::Minus, 1.0));
  for (int j = 0; j < g.nv(); ++j)
    for (int s = 0; s < g.spatial_count(); ++s) {
      const double tau = exit_time(g, g.node(s), g.direction(j), Sign::Minus);
      EXPECT_NEAR(f(s, j), std::exp(-sigma * tau), 1e-12);
    }
}

TEST(Transport, InverseSolvesTheStreamingOperator) {
  // apply_operator(A^{-1} g) = g up to O(h^2). The source vanishes near the
  // walls so A^{-1} g has no kinks along corner characteristics.
  auto err_at = [](int nx) {
    const Grid g = Grid::square(nx, 8);
    std::vector<double> sig(static_cast<std::size_t>(g.spatial_count()));
    for (int s = 0; s < g.spatial_count(); ++s)
      sig[static_cast<std::size_t>(s)] = 1.0 + 0.3 * std::sin(3.0 * g.node(s).x) * g.node(s).y;
    const Transport t(Medium(g, sig, ScatteringKernel::isotropic(g.spatial_count(), 0.0)));
    PhaseField src(g);
    for (int j = 0; j < g.nv(); ++j)
      for (int s = 0; s < g.spatial_count(); ++s)
      {
        const double r2 = std::pow((g.node(s) - Vec2{0.5, 0.5}).norm() / 0.35, 2);
        src(s, j) = r2 < 1.0 ? std::pow(1.0 - r2, 4) * (1.0 + 0.5 * std::cos(j)) : 0.0;
      }
    const PhaseField back = t.apply_operator(t.apply_inverse(src));
    double e = 0.0;
    for (int j = 0; j < g.nv(); ++j)
      for (int s = 0; s < g.spatial_count(); ++s) e = std::max(e, std::abs(back(s, j) - src(s, j)));
    return e;
  };
  const double e1 = err_at(16), e2 = err_at(32);
  EXPECT_LT(e2, 0.05);
  EXPECT_GT(std::log2(e1 / e2), 1.5);
}

TEST(Transport, TransposesAreAdjoint) {
  const Grid g = Grid::square(6, 10);
  std::vector<double> sig(static_cast<std::size_t>(g.spatial_count()));
  for (int s = 0; s < g.spatial_count(); ++s) sig[static_cast<std::size_t>(s)] = 1.0 + g.node(s).x;
  ScatteringKernel k(g.spatial_count(), 1);
  for (int s = 0; s < g.spatial_count(); ++s) {
    k.coefficient(s, 0) = 0.4 + 0.1 * g.node(s).y;
    k.coefficient(s, 1) = 0.15;
  }
  const Transport t(Medium(g, sig, k));
  const PhaseField a = random_field(g, 1), b = random_field(g, 2);
  const double l1 = dot(t.apply_inverse(a), b), r1 = dot(a, t.apply_inverse_transpose(b));
  EXPECT_NEAR(l1, r1, 1e-12 * std::abs(l1));
  const double l2 = dot(t.apply_scattering(a), b), r2 = dot(a, t.apply_scattering_transpose(b));
  EXPECT_NEAR(l2, r2, 1e-12 * std::abs(l2));
}

TEST(Transport, ScatteringOfConstantIsRate) {
  const Grid g = Grid::square(4, 16);
  const Transport t(constant_medium(g, 1.0, 0.3));
  const PhaseField bf = t.apply_scattering(PhaseField(g, 1.0));
  for (double v : bf.values()) EXPECT_NEAR(v, 0.3, 1e-14);
  const PhaseField same = apply_kernel(g, t.medium().kernel(), random_field(g, 5));
  const PhaseField ref = t.apply_scattering(random_field(g, 5));
  for (std::size_t i = 0; i < same.size(); ++i) EXPECT_NEAR(same.values()[i], ref.values()[i], 1e-14);
}

TEST(Transport, RestrictReadsManifoldNodes) {
  const Grid g = Grid::square(4, 8);
  const Transport t(constant_medium(g, 1.0, 0.0));
  PhaseField f(g);
  for (int j = 0; j < g.nv(); ++j)
    for (int s = 0; s < g.spatial_count(); ++s) f(s, j) = 100.0 * j + s;
  const BoundaryField out = t.restrict(f, Side::Plus);
  for (std::size_t b = 0; b < out.size(); ++b)
    EXPECT_DOUBLE_EQ(out[b], 100.0 * t.outflow()[b].ordinate + t.outflow()[b].spatial);
  EXPECT_THROW(t.lift(BoundaryField{Side::Plus, out.values}), ArgumentError);
  EXPECT_THROW(t.apply_inverse(PhaseField(3, 3)), ArgumentError);
}
