#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

namespace rte {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double dot(Vec2 o) const { return x * o.x + y * o.y; }
  double cross(Vec2 o) const { return x * o.y - y * o.x; }
  double norm() const { return std::hypot(x, y); }
};

inline Vec2 operator*(double s, Vec2 v) { return v * s; }

enum class Dimension { Square, Slab };

// Minus is the inflow set (v . n < 0), Plus the outflow set.
enum class Side { Minus, Plus };

// Walls of the unit square. The slab only uses Left (x = 0) and Right (x = 1).
enum class Edge : int { Left = 0, Right = 1, Bottom = 2, Top = 3 };

enum class SlabNodes { Gauss, Uniform };

// Vertex-centred grid on [0,1]^2 (or [0,1]) times a discrete ordinate set.
// Spatial index runs x fastest: s = ix + iy * (nx + 1). Phase-space values
// are stored ordinate-major, so each ordinate owns a contiguous block.
class Grid {
public:
  // Uniform angles theta_j = 2 pi j / nv on the unit circle.
  static Grid square(int nx, int nv);
  // Cosines mu_j on [-1, 1]; directions are stored as (mu_j, 0).
  static Grid slab(int nx, int nv, SlabNodes nodes = SlabNodes::Gauss);

  Dimension dimension() const { return dim_; }
  bool is_square() const { return dim_ == Dimension::Square; }
  int nx() const { return nx_; }
  double dx() const { return dx_; }
  int nv() const { return static_cast<int>(dirs_.size()); }

  int axis_nodes() const { return nx_ + 1; }
  int spatial_count() const { return is_square() ? (nx_ + 1) * (nx_ + 1) : nx_ + 1; }
  std::size_t phase_size() const {
    return static_cast<std::size_t>(spatial_count()) * static_cast<std::size_t>(nv());
  }
  std::size_t phase_index(int s, int j) const {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(spatial_count()) +
           static_cast<std::size_t>(s);
  }

  int node_index(int ix, int iy = 0) const { return ix + iy * (nx_ + 1); }
  std::array<int, 2> node_coords(int s) const {
    return {s % (nx_ + 1), is_square() ? s / (nx_ + 1) : 0};
  }
  Vec2 node(int s) const;
  bool on_boundary(int s) const;

  Vec2 direction(int j) const { return dirs_[static_cast<std::size_t>(j)]; }
  double weight(int j) const { return weights_[static_cast<std::size_t>(j)]; }
  // Polar angle of ordinate j (square grids only).
  double angle(int j) const { return angles_[static_cast<std::size_t>(j)]; }
  // 2 pi on the circle, 2 on [-1, 1].
  double velocity_measure() const;
  // Spacing between neighbouring ordinates (angle on the circle, max gap in mu on the slab).
  double ordinate_spacing() const;

  // Ordinate whose direction is closest to v.
  int nearest_ordinate(Vec2 v) const;

  bool contains(Vec2 p, double tol = 1e-12) const;

private:
  Grid(Dimension dim, int nx) : dim_(dim), nx_(nx), dx_(1.0 / nx) {}

  Dimension dim_;
  int nx_;
  double dx_;
  std::vector<Vec2> dirs_;
  std::vector<double> weights_;
  std::vector<double> angles_;
};

// Gauss-Legendre nodes and weights on [-1, 1].
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n);

enum class Sign { Plus, Minus };

struct Exit {
  double time = 0.0;
  Edge edge = Edge::Left;
};

// min{t >= 0 : x +- t v on the boundary}; closed form for the box.
double exit_time(const Grid& grid, Vec2 x, Vec2 v, Sign sign);
// Same, plus the wall that is hit (ties resolved in Edge order).
Exit exit_point(const Grid& grid, Vec2 x, Vec2 v, Sign sign);

// (x' + tau_+(x', v') v', v').
std::pair<Vec2, Vec2> counterpart(const Grid& grid, Vec2 x, Vec2 v);

// Backward chord {x - t v : t in [0, tau_-]} sampled uniformly.
struct Chord {
  Vec2 origin;
  Vec2 direction;
  double length = 0.0;
  double spacing = 0.0;
  int count = 1;

  double t(int k) const { return k * spacing; }
  Vec2 point(int k) const { return origin - direction * (k * spacing); }
  Vec2 foot() const { return origin - direction * length; }
};

Chord trace_chord(const Grid& grid, Vec2 x, Vec2 v, double step);
// Sample count used for a backward chord of length tau at the given step.
int chord_samples(double tau, double step);

Vec2 edge_normal(Edge e);
int edge_count(const Grid& grid);
// Spatial index of node i (0..nx) along an edge; i counts along the free coordinate.
int edge_spatial(const Grid& grid, Edge e, int i);
// Coordinate along the edge of a boundary point.
double edge_coordinate(Edge e, Vec2 p);

struct BoundaryNode {
  int spatial = 0;
  int ordinate = 0;
  Vec2 x;
  Vec2 normal;   // outward normal; at corners the wall with the larger |n.v|
  double weight = 0.0;  // d xi = |n.v| * surface weight * angular weight
};

// Grid nodes of Gamma_- or Gamma_+. A node is in Gamma_- when tau_-(x,v) = 0
// and tau_+(x,v) > 0; grazing pairs (|n.v| < 1e-10 on every wall through x)
// are left out. Corners count once with half a surface weight per wall.
class BoundaryManifold {
public:
  BoundaryManifold(const Grid& grid, Side side);

  Side side() const { return side_; }
  std::size_t size() const { return nodes_.size(); }
  const BoundaryNode& operator[](std::size_t i) const { return nodes_[i]; }
  const std::vector<BoundaryNode>& nodes() const { return nodes_; }
  auto begin() const { return nodes_.begin(); }
  auto end() const { return nodes_.end(); }

  // Index of (spatial, ordinate) in this manifold or -1.
  int find(int spatial, int ordinate) const;
  // Node i along edge e for ordinate j, or -1 when that pair is not on the manifold.
  int edge_node(Edge e, int i, int ordinate) const;
  // Closest manifold node with the given ordinate; distance written when requested.
  int nearest(Vec2 p, int ordinate, double* distance = nullptr) const;

  int nx() const { return nx_; }
  int spatial_count() const { return n_spatial_; }
  int nv() const { return nv_; }

private:
  Side side_;
  Dimension dim_;
  int nx_;
  int n_spatial_;
  int nv_;
  std::vector<BoundaryNode> nodes_;
  std::vector<int> lookup_;
  std::vector<std::vector<int>> by_ordinate_;
};

}  // namespace rte
