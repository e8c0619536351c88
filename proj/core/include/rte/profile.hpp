#pragma once

namespace rte {

// C^2 cutoff: 1 on [0, 1/2], 0 on [1, inf), quintic smoothstep in between.
// With u = 2r - 1: psi = 1 - (6u^5 - 15u^4 + 10u^3).
inline double bump_psi(double r) {
  if (r < 0.0) r = -r;
  if (r <= 0.5) return 1.0;
  if (r >= 1.0) return 0.0;
  const double u = 2.0 * r - 1.0;
  return 1.0 - u * u * u * (u * (6.0 * u - 15.0) + 10.0);
}

}  // namespace rte
