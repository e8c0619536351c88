#pragma once

#include <cstddef>
#include <vector>

#include "rte/geometry.hpp"
#include "rte/medium.hpp"

namespace rte {

// Values on the phase grid, one contiguous block per ordinate.
class PhaseField {
public:
  PhaseField() = default;
  PhaseField(int n_spatial, int nv, double fill = 0.0);
  explicit PhaseField(const Grid& grid, double fill = 0.0)
      : PhaseField(grid.spatial_count(), grid.nv(), fill) {}

  int n_spatial() const { return n_spatial_; }
  int nv() const { return nv_; }
  std::size_t size() const { return data_.size(); }
  bool matches(const Grid& grid) const {
    return n_spatial_ == grid.spatial_count() && nv_ == grid.nv();
  }

  double& operator()(int s, int j) { return data_[offset(j) + static_cast<std::size_t>(s)]; }
  double operator()(int s, int j) const { return data_[offset(j) + static_cast<std::size_t>(s)]; }
  double* ordinate(int j) { return data_.data() + offset(j); }
  const double* ordinate(int j) const { return data_.data() + offset(j); }
  std::vector<double>& values() { return data_; }
  const std::vector<double>& values() const { return data_; }

  PhaseField& operator+=(const PhaseField& o);
  PhaseField& operator-=(const PhaseField& o);
  PhaseField& operator*=(double a);
  double max_abs() const;

private:
  std::size_t offset(int j) const {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(n_spatial_);
  }

  int n_spatial_ = 0;
  int nv_ = 0;
  std::vector<double> data_;
};

PhaseField operator+(PhaseField a, const PhaseField& b);
PhaseField operator-(PhaseField a, const PhaseField& b);
PhaseField operator*(double s, PhaseField a);

// Values on the nodes of one boundary manifold, in manifold order.
struct BoundaryField {
  Side side = Side::Minus;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  double& operator[](std::size_t i) { return values[i]; }
  double operator[](std::size_t i) const { return values[i]; }
};

// Discrete lift J, inverse streaming A^{-1}, scattering B and restriction
// for one medium. A^{-1} evaluates the attenuated line integral
//   (A^{-1} g)(x,v) = - int_0^{tau_-} exp(-int_0^t sigma) g(x - t v, v) dt
// along the full backward chord of every node by the trapezoid rule. Both g
// and sigma are sampled bilinearly at the chord points, and the attenuation
// uses the optical depth accumulated along that same chord.
class Transport {
public:
  explicit Transport(Medium medium);

  const Medium& medium() const { return medium_; }
  const Grid& grid() const { return medium_.grid(); }
  const BoundaryManifold& inflow() const { return inflow_; }
  const BoundaryManifold& outflow() const { return outflow_; }
  const BoundaryManifold& manifold(Side side) const {
    return side == Side::Minus ? inflow_ : outflow_;
  }
  BoundaryField boundary(Side side, double fill = 0.0) const;

  PhaseField lift(const BoundaryField& f_minus) const;
  PhaseField apply_inverse(const PhaseField& g) const;
  PhaseField apply_inverse_transpose(const PhaseField& h) const;
  PhaseField apply_scattering(const PhaseField& f) const;
  PhaseField apply_scattering_transpose(const PhaseField& f) const;
  BoundaryField restrict(const PhaseField& f, Side side) const;

  // -v.grad u - sigma u by second-order differences (one-sided on walls).
  PhaseField apply_operator(const PhaseField& u) const;

private:
  void check(const PhaseField& f) const;
  double foot_value(const BoundaryField& f_minus, Edge edge, double coord, int j) const;

  Medium medium_;
  BoundaryManifold inflow_;
  BoundaryManifold outflow_;
  // Optical depth of each node's full backward chord, used by the lift.
  std::vector<double> depth_;
};

// B applied with an arbitrary kernel on the medium's angular tables. Used by
// the k-gradient, where the kernel is a basis function rather than the medium's.
PhaseField apply_kernel(const Grid& grid, const ScatteringKernel& kernel, const PhaseField& f);

}  // namespace rte
