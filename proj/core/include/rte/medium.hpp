#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "rte/geometry.hpp"

namespace rte {

// Rotation-invariant kernel k(x, v.v') = sum_p c_p(x) cos(p * angle(v, v')) / |V|.
// With this normalization c_0(x) is the total scattering rate int k dv'.
class ScatteringKernel {
public:
  ScatteringKernel() = default;
  ScatteringKernel(int n_spatial, int order);
  ScatteringKernel(int n_spatial, int order, std::vector<double> coeffs);

  static ScatteringKernel isotropic(int n_spatial, double kappa);
  static ScatteringKernel isotropic(const std::vector<double>& kappa);

  int order() const { return order_; }
  int terms() const { return order_ + 1; }
  int n_spatial() const { return n_spatial_; }
  double coefficient(int s, int p) const { return coeffs_[index(s, p)]; }
  double& coefficient(int s, int p) { return coeffs_[index(s, p)]; }
  const std::vector<double>& coefficients() const { return coeffs_; }
  bool is_zero() const;
  ScatteringKernel scaled(double a) const;

private:
  std::size_t index(int s, int p) const {
    return static_cast<std::size_t>(s) * static_cast<std::size_t>(order_ + 1) +
           static_cast<std::size_t>(p);
  }

  int n_spatial_ = 0;
  int order_ = 0;
  std::vector<double> coeffs_;
};

struct MediumOptions {
  double knudsen = 1.0;
  // Accept nu = 0 (pure scattering). The bounded domain still makes source
  // iteration contract because every chord has finite length.
  bool conservative = false;
  // Exact sigma for oracles; when absent sigma_at interpolates the nodes.
  std::function<double(Vec2)> sigma_fn;
};

class Medium {
public:
  Medium(Grid grid, std::vector<double> sigma, ScatteringKernel kernel, MediumOptions opts = {});

  // sigma = Kn sigma_a + sigma_nu / Kn and k -> k / Kn, sigma_nu = int k dv'.
  static Medium diffusive(Grid grid, std::vector<double> sigma_a, const ScatteringKernel& kernel,
                          double knudsen, bool conservative = false);

  const Grid& grid() const { return grid_; }
  const std::vector<double>& sigma() const { return sigma_; }
  double sigma(int s) const { return sigma_[static_cast<std::size_t>(s)]; }
  const ScatteringKernel& kernel() const { return kernel_; }
  const std::vector<double>& sigma_a() const { return sigma_a_; }
  double knudsen() const { return opts_.knudsen; }
  bool conservative() const { return opts_.conservative; }
  const MediumOptions& options() const { return opts_; }

  double margin() const { return margin_; }
  // max k over nodes and ordinate pairs (C_1).
  double kernel_bound() const { return kernel_bound_; }

  // k(x_s, v_i, v_j).
  double k(int s, int i, int j) const;
  // int k(x_s, v_i, v') dv' by the angular quadrature.
  double sigma_nu(int s, int i) const;

  double sigma_at(Vec2 p) const;
  // Kernel coefficient c_p at an arbitrary point (bilinear in the nodes).
  double coefficient_at(Vec2 p, int order) const;

  // Angular tables cos(p theta_j), sin(p theta_j), p <= kernel order.
  const std::vector<double>& cos_table() const { return cos_; }
  const std::vector<double>& sin_table() const { return sin_; }

private:
  void build_tables();
  void validate();

  Grid grid_;
  std::vector<double> sigma_;
  ScatteringKernel kernel_;
  MediumOptions opts_;
  std::vector<double> sigma_a_;
  std::vector<double> cos_, sin_;
  double margin_ = 0.0;
  double kernel_bound_ = 0.0;
};

// min over nodes and ordinates of sigma - int k dv'. Throws AdmissibilityError
// naming the worst node when the margin is not positive.
double validate_admissible(const Medium& m);

class PhaseField;

// (B f)(x_s, v_i) by the angular quadrature.
double scattering_integral(const Medium& m, const PhaseField& f, int s, int i);

// Bilinear interpolation of a nodal field on a square grid (linear on a slab).
double interpolate_nodal(const Grid& grid, const std::vector<double>& values, Vec2 p);

struct PhantomSpec {
  std::string kind = "constant";  // constant | smooth-bump | two-inclusion
  double sigma0 = 1.0;
  double kappa = 0.2;             // int k dv'
  double amplitude = 0.5;
  double width = 0.2;
  Vec2 center{0.5, 0.5};
  double amplitude2 = -0.3;
  double width2 = 0.15;
  Vec2 center2{0.68, 0.32};
  // c_p / c_0 for p >= 1; empty means isotropic.
  std::vector<double> anisotropy;
};

class Phantom {
public:
  explicit Phantom(PhantomSpec spec);

  const PhantomSpec& spec() const { return spec_; }
  double sigma(Vec2 p) const;
  double kappa(Vec2 p) const;
  std::vector<double> sample_sigma(const Grid& grid) const;
  ScatteringKernel kernel(const Grid& grid) const;
  Medium build(const Grid& grid) const;

private:
  PhantomSpec spec_;
};

// Flat text: header line, then one row per spatial node (x fastest) holding
// sigma followed by c_0..c_P.
void write_medium(std::ostream& out, const Medium& m);
Medium read_medium(std::istream& in, MediumOptions opts = {});

}  // namespace rte
