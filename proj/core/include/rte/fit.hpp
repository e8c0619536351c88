#pragma once

#include <vector>

namespace rte {

// Ordinary least squares y = intercept + slope x.
struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  double slope_stderr = 0.0;  // 0 when fewer than 3 points
  int n = 0;

  double at(double x) const { return intercept + slope * x; }
};

// Throws ArgumentError for fewer than 2 points, mismatched sizes or constant x.
LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

// Fit of ln y against ln x; every value must be positive.
LinearFit loglog_fit(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace rte
