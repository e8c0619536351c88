#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "rte/measurement.hpp"

namespace rte {

// Kernel coefficients c_p(x), constant on each cell of a zones x zones
// partition of the square, p = 0..order. Layout: values[zone * (order+1) + p],
// zones numbered x fastest.
class KParameters {
public:
  KParameters(int zones, int order, double fill = 0.0);

  int zones() const { return zones_; }
  int order() const { return order_; }
  int size() const { return static_cast<int>(values_.size()); }
  double& at(int zone, int p) { return values_[index(zone, p)]; }
  double at(int zone, int p) const { return values_[index(zone, p)]; }
  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }
  Eigen::VectorXd vector() const;
  void assign(const Eigen::VectorXd& v);

  int zone_of(const Grid& grid, int s) const;
  ScatteringKernel kernel(const Grid& grid) const;
  // Kernel of d(k)/d(values[i]).
  ScatteringKernel basis(const Grid& grid, int i) const;
  // k >= 0 at every pair of quadrature ordinates.
  bool kernel_nonnegative(const Grid& grid) const;

private:
  std::size_t index(int zone, int p) const {
    return static_cast<std::size_t>(zone) * static_cast<std::size_t>(order_ + 1) +
           static_cast<std::size_t>(p);
  }

  int zones_;
  int order_;
  std::vector<double> values_;
};

// One experiment as seen by the fit: the source, the separated data
// r1 + r2 and the outflow nodes where that target is defined.
struct KExperiment {
  BoundaryField f_minus;
  std::vector<double> target;
  std::vector<char> mask;
  double weight = 1.0;
};

// Mask = receiver node plus the single-scatter manifold.
KExperiment make_k_experiment(const Experiment& exp);

struct KProblem {
  Grid grid;
  std::vector<double> sigma;  // fixed absorption on the grid nodes
  std::vector<KExperiment> experiments;
  SolveOptions solve{1e-12, 4000};
  MediumOptions medium;
};

struct FitState {
  double objective = 0.0;     // +inf for inadmissible or non-convergent parameters
  Eigen::VectorXd gradient;   // empty unless requested and finite
};

// sum_i w_i || E_+ f_i - target_i ||^2 over the masked nodes.
double objective(const KParameters& kp, const KProblem& problem);

// Objective and, by one adjoint solve per experiment, its gradient.
FitState evaluate(const KParameters& kp, const KProblem& problem, bool with_gradient = true);
Eigen::VectorXd gradient_adjoint(const KParameters& kp, const KProblem& problem);

struct KRecoveryOptions {
  int max_iter = 200;
  double gtol = 1e-9;    // on the projected gradient
  double ftol = 0.0;     // stop once the objective falls below this
  double armijo = 1e-4;
  int max_halvings = 50;
  double initial_step = 0.0;  // 0: 1 / ||g|| on the first iteration
};

struct KTraceEntry {
  int iteration = 0;
  double objective = 0.0;
  double gradient_norm = 0.0;
  double step = 0.0;
};

enum class KStatus { Converged, ObjectiveReached, MaxIterations, LineSearchFailed };

std::string to_string(KStatus s);

struct KRecoveryResult {
  explicit KRecoveryResult(KParameters p) : params(std::move(p)) {}

  KParameters params;
  double objective = 0.0;
  Eigen::VectorXd gradient;
  std::vector<KTraceEntry> trace;
  KStatus status = KStatus::MaxIterations;
  int evaluations = 0;
};

// Projected gradient on values >= 0 with Barzilai-Borwein trial steps and
// Armijo backtracking by halving.
KRecoveryResult recover_k(const KProblem& problem, KParameters initial, KRecoveryOptions opts = {});

}  // namespace rte
