#pragma once

#include <vector>

#include "rte/forward.hpp"
#include "rte/profile.hpp"

namespace rte {

struct SourceSpec {
  int anchor = 0;         // index into the inflow manifold
  double epsilon = 0.0;   // profile width; below dx the source is a single node
  bool delta = false;     // force the single-node mode
};

// Inflow node at (x0, ordinate); throws ArgumentError when x0 is not a node of
// the manifold for that ordinate.
int find_anchor(const BoundaryManifold& inflow, Vec2 x0, int ordinate);

// f_-(x, v) = psi(|x - x0| / eps) psi(|v - v0| / eps), or a unit spike.
BoundaryField make_source(const Grid& grid, const BoundaryManifold& inflow, const SourceSpec& spec);

struct Experiment {
  SourceSpec source;
  BoundaryField f_minus;
  BoundaryField phi;              // measured outflow
  BoundaryField phi1, phi2, phi3; // reference split from the Neumann decomposition
  BoundaryField r1, r2, r3;       // separated data
  std::vector<char> scatter_mask; // outflow nodes on the single-scatter manifold
  Vec2 counterpart;               // exact exit point of the anchor chord
  int receiver = -1;              // outflow node nearest the counterpart
  double snap_distance = 0.0;
  int iterations = 0;
  double residual = 0.0;

  double source_value() const { return f_minus[static_cast<std::size_t>(source.anchor)]; }
  double reading() const { return phi[static_cast<std::size_t>(receiver)]; }
  double ballistic_reading() const { return phi1[static_cast<std::size_t>(receiver)]; }
};

// Solve, restrict and separate. The reference split is always computed since
// the synthetic-truth channel is part of every run.
Experiment run_experiment(const Transport& t, const SourceSpec& spec, SolveOptions opts = {});

// Fill receiver, r1/r2/r3 and scatter_mask from phi.
void extract_components(const Transport& t, Experiment& exp);

// Angular test for the single-scatter manifold: does the backward line from
// (x, v) meet the anchor beam within half an ordinate spacing?
bool on_single_scatter_manifold(const Grid& grid, Vec2 anchor, Vec2 v0, Vec2 exit, Vec2 x, int j);

struct MollifiedReadout {
  Vec2 receiver_point;
  int receiver_ordinate = 0;
  double eps1 = 0.0;
  double e1 = 0.0, e2 = 0.0, e3 = 0.0;
  bool degenerate = false;  // eps1 below the node spacing

  double contamination() const { return (e2 + e3) / e1; }
};

MollifiedReadout mollified_functionals(const Transport& t, const Experiment& exp, double eps1);

// One accepted chord of a parallel-beam design.
struct DesignedChord {
  int anchor = -1;
  int receiver = -1;
  int ordinate = 0;
  int angle_index = 0;
  int offset_index = 0;
  double foot_offset = 0.0;  // distance between anchor and the receiver's chord foot
};

struct BeamDesign {
  std::vector<DesignedChord> chords;
  int rejected = 0;
};

// n_angles ordinates spread over [0, pi) and n_offsets parallel lines each.
// A line is kept when some inflow node near its entry point has a counterpart
// within dx/2 of an outflow node whose backward chord lands within
// foot_tolerance of that inflow node.
BeamDesign design_parallel_beam(const Transport& t, int n_angles, int n_offsets,
                                double offset_extent, double foot_tolerance);

}  // namespace rte
