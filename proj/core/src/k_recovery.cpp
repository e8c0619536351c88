#include "rte/k_recovery.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

#include "rte/error.hpp"

namespace rte {

KParameters::KParameters(int zones, int order, double fill)
    : zones_(zones), order_(order) {
  if (zones < 1 || order < 0) throw ArgumentError("KParameters needs zones >= 1 and order >= 0");
  values_.assign(static_cast<std::size_t>(zones * zones * (order + 1)), fill);
}

Eigen::VectorXd KParameters::vector() const {
  return Eigen::Map<const Eigen::VectorXd>(values_.data(), size());
}

void KParameters::assign(const Eigen::VectorXd& v) {
  if (v.size() != size()) throw ArgumentError("parameter vector has the wrong length");
  for (int i = 0; i < size(); ++i) values_[static_cast<std::size_t>(i)] = v(i);
}

int KParameters::zone_of(const Grid& grid, int s) const {
  const Vec2 p = grid.node(s);
  const int zx = std::min(zones_ - 1, static_cast<int>(p.x * zones_));
  const int zy = std::min(zones_ - 1, static_cast<int>(p.y * zones_));
  return zx + zy * zones_;
}

ScatteringKernel KParameters::kernel(const Grid& grid) const {
  ScatteringKernel k(grid.spatial_count(), order_);
  for (int s = 0; s < grid.spatial_count(); ++s) {
    const int z = zone_of(grid, s);
    for (int p = 0; p <= order_; ++p) k.coefficient(s, p) = at(z, p);
  }
  return k;
}

ScatteringKernel KParameters::basis(const Grid& grid, int i) const {
  if (i < 0 || i >= size()) throw ArgumentError("basis index out of range");
  const int zone = i / (order_ + 1);
  const int p = i % (order_ + 1);
  ScatteringKernel k(grid.spatial_count(), order_);
  for (int s = 0; s < grid.spatial_count(); ++s)
    if (zone_of(grid, s) == zone) k.coefficient(s, p) = 1.0;
  return k;
}

bool KParameters::kernel_nonnegative(const Grid& grid) const {
  // Relative angles between uniform ordinates are multiples of the spacing.
  const double h = grid.ordinate_spacing();
  for (int z = 0; z < zones_ * zones_; ++z)
    for (int m = 0; m < grid.nv(); ++m) {
      double k = 0.0;
      for (int p = 0; p <= order_; ++p) k += at(z, p) * std::cos(p * m * h);
      if (k < -1e-14) return false;
    }
  return true;
}

KExperiment make_k_experiment(const Experiment& exp) {
  KExperiment k;
  k.f_minus = exp.f_minus;
  const std::size_t n = exp.phi.size();
  k.target.assign(n, 0.0);
  k.mask.assign(n, 0);
  for (std::size_t b = 0; b < n; ++b) {
    const bool rec = static_cast<int>(b) == exp.receiver;
    if (rec || exp.scatter_mask[b]) {
      k.mask[b] = 1;
      k.target[b] = exp.r1[b] + exp.r2[b];
    }
  }
  return k;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Transport for a trial parameter set, or nothing when it is inadmissible.
std::optional<Transport> build(const KParameters& kp, const KProblem& pb) {
  if (!kp.kernel_nonnegative(pb.grid)) return std::nullopt;
  for (double v : kp.values())
    if (!std::isfinite(v)) return std::nullopt;
  try {
    return Transport(Medium(pb.grid, pb.sigma, kp.kernel(pb.grid), pb.medium));
  } catch (const AdmissibilityError&) {
    return std::nullopt;
  }
}

}  // namespace

FitState evaluate(const KParameters& kp, const KProblem& pb, bool with_gradient) {
  FitState st;
  auto t = build(kp, pb);
  if (!t) {
    st.objective = kInf;
    return st;
  }
  const Grid& g = pb.grid;
  std::vector<ScatteringKernel> basis;
  if (with_gradient) {
    st.gradient = Eigen::VectorXd::Zero(kp.size());
    for (int i = 0; i < kp.size(); ++i) basis.push_back(kp.basis(g, i));
  }
  const BoundaryManifold& out = t->outflow();
  try {
    for (const KExperiment& e : pb.experiments) {
      if (e.target.size() != out.size() || e.mask.size() != out.size())
        throw ArgumentError("experiment target does not match the outflow manifold");
      SolveResult fwd = solve_forward(*t, e.f_minus, pb.solve);
      PhaseField q(g);
      double obj = 0.0;
      for (std::size_t b = 0; b < out.size(); ++b) {
        if (!e.mask[b]) continue;
        const double r = fwd.f(out[b].spatial, out[b].ordinate) - e.target[b];
        obj += r * r;
        q(out[b].spatial, out[b].ordinate) += e.weight * r;
      }
      st.objective += e.weight * obj;
      if (!with_gradient) continue;

      // mu = A^{-T} (q - B^T mu); then dJ/dtheta = -2 <mu, B_theta f>.
      PhaseField mu = t->apply_inverse_transpose(q);
      int it = 0;
      for (;; ++it) {
        if (it >= pb.solve.max_iter)
          throw ConvergenceError("adjoint iteration did not converge", it, 0.0);
        PhaseField next = t->apply_inverse_transpose(q - t->apply_scattering_transpose(mu));
        double diff = 0.0;
        for (std::size_t i = 0; i < next.size(); ++i)
          diff = std::max(diff, std::abs(next.values()[i] - mu.values()[i]));
        mu = std::move(next);
        if (diff <= pb.solve.tol * std::max(1.0, mu.max_abs())) break;
      }
      for (int i = 0; i < kp.size(); ++i) {
        const PhaseField bf = apply_kernel(g, basis[static_cast<std::size_t>(i)], fwd.f);
        double dot = 0.0;
        for (std::size_t m = 0; m < bf.size(); ++m) dot += mu.values()[m] * bf.values()[m];
        st.gradient(i) -= 2.0 * dot;
      }
    }
  } catch (const ConvergenceError&) {
    st.objective = kInf;
    st.gradient.resize(0);
  }
  return st;
}

double objective(const KParameters& kp, const KProblem& problem) {
  return evaluate(kp, problem, false).objective;
}

Eigen::VectorXd gradient_adjoint(const KParameters& kp, const KProblem& problem) {
  FitState st = evaluate(kp, problem, true);
  if (!std::isfinite(st.objective))
    throw AdmissibilityError("gradient requested at an inadmissible or non-convergent parameter set");
  return st.gradient;
}

std::string to_string(KStatus s) {
  switch (s) {
    case KStatus::Converged: return "converged";
    case KStatus::ObjectiveReached: return "objective-reached";
    case KStatus::MaxIterations: return "max-iterations";
    case KStatus::LineSearchFailed: return "line-search-failed";
  }
  return "unknown";
}

KRecoveryResult recover_k(const KProblem& problem, KParameters initial, KRecoveryOptions opts) {
  if (opts.max_iter < 0 || opts.max_halvings < 1) throw ArgumentError("bad k-recovery options");
  auto project = [](Eigen::VectorXd v) { return v.cwiseMax(0.0); };

  KRecoveryResult res(std::move(initial));
  Eigen::VectorXd x = project(res.params.vector());
  res.params.assign(x);
  FitState st = evaluate(res.params, problem, true);
  ++res.evaluations;
  if (!std::isfinite(st.objective))
    throw AdmissibilityError("initial kernel parameters are inadmissible for the fixed sigma");

  Eigen::VectorXd x_prev, g_prev;
  double step = 0.0;
  for (int it = 0;; ++it) {
    const Eigen::VectorXd& g = st.gradient;
    const double pg = (project(x - g) - x).norm();
    res.trace.push_back({it, st.objective, pg, step});
    if (pg <= opts.gtol) {
      res.status = KStatus::Converged;
      break;
    }
    if (st.objective <= opts.ftol) {
      res.status = KStatus::ObjectiveReached;
      break;
    }
    if (it >= opts.max_iter) {
      res.status = KStatus::MaxIterations;
      break;
    }

    double alpha;
    if (it == 0) {
      alpha = opts.initial_step > 0.0 ? opts.initial_step : 1.0 / std::max(g.norm(), 1e-300);
    } else {
      const Eigen::VectorXd s = x - x_prev, y = g - g_prev;
      const double sy = s.dot(y);
      alpha = sy > 0.0 ? s.squaredNorm() / sy : 2.0 * step;
    }

    bool accepted = false;
    for (int h = 0; h < opts.max_halvings; ++h, alpha *= 0.5) {
      const Eigen::VectorXd trial = project(x - alpha * g);
      KParameters kp = res.params;
      kp.assign(trial);
      FitState ts = evaluate(kp, problem, true);
      ++res.evaluations;
      if (std::isfinite(ts.objective) &&
          ts.objective <= st.objective + opts.armijo * g.dot(trial - x)) {
        x_prev = x;
        g_prev = g;
        x = trial;
        res.params = std::move(kp);
        st = std::move(ts);
        step = alpha;
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      res.status = KStatus::LineSearchFailed;
      break;
    }
  }
  res.objective = st.objective;
  res.gradient = st.gradient;
  return res;
}

}  // namespace rte
