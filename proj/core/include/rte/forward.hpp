#pragma once

#include <vector>

#include "rte/transport.hpp"

namespace rte {

struct SolveOptions {
  double tol = 1e-10;
  int max_iter = 2000;
};

struct SolveResult {
  PhaseField f;
  int iterations = 0;
  double residual = 0.0;
  // max-norm of successive differences, one entry per iteration
  std::vector<double> history;
};

// Source iteration f <- J f_- - A^{-1} B f, started from J f_-.
SolveResult solve_forward(const Transport& t, const BoundaryField& f_minus, SolveOptions opts = {});

// Same iteration with a volume source: f <- q - A^{-1} B f.
SolveResult solve_fixed_point(const Transport& t, const PhaseField& q, SolveOptions opts = {});

struct Decomposition {
  PhaseField f;
  PhaseField f1;  // ballistic
  PhaseField f2;  // single scattering
  PhaseField f3;  // multiple scattering, solved separately
  double residual = 0.0;
  int iterations = 0;
};

Decomposition decompose_neumann(const Transport& t, const BoundaryField& f_minus,
                                SolveOptions opts = {});

struct OracleOptions {
  // Gauss points per unit length for the attenuation integrals.
  int points_per_unit = 64;
};

// Single-scatter contribution at an outflow node from a unit value at one
// inflow node, evaluated directly from the scattering geometry: the receiver's
// backward ray meets the source beam at one point, where the delta in the
// scattering-point parameter is integrated out analytically. The source value
// is spread along its wall like the lift's linear interpolation, so the result
// is comparable with restrict(f2, +) at the receiver.
double single_scatter_oracle(const Medium& m, const BoundaryManifold& inflow, int source,
                             const BoundaryManifold& outflow, int receiver,
                             OracleOptions opts = {});

}  // namespace rte
