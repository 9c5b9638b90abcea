#pragma once

#include "polylab/polytope.hpp"

#include <span>
#include <vector>

namespace polylab {

/// Cap P ∩ {x : u . x >= h_P(u) - t}.
struct Cap {
  Vec u;
  double t = 0.0;
  double level = 0.0;  // h_P(u) - t
  double volume = 0.0;
  Vec center;  // lexicographically smallest vertex attaining h_P(u)

  bool contains(const Vec& x, double tol = kTauGeom) const { return u.dot(x) >= level - tol; }
  Halfspace halfspace() const { return {-u, -level}; }
};

/// Throws InvalidDepth when t <= 0. Depths beyond the width give all of P.
Cap make_cap(const Polytope& p, const Vec& u, double t);

/// C^lambda: same direction, depth lambda * t.
Cap dilate(const Polytope& p, const Cap& cap, double lambda);

/// The cap as a polytope in its own right.
Polytope cap_slice(const Polytope& p, const Cap& cap);

struct CapSearch {
  int grid = 0;     // 0 picks 512 (d=2), 2048 (d=3), 4096 otherwise
  int seeds = 8;    // Nelder-Mead starts from the best separated grid directions
  double tol = kTauV;
};

struct MinimalCapResult {
  double v = 0.0;
  Cap cap;
  int direction_grid_size = 0;
};

/// Minimizes the volume of caps whose bounding hyperplane passes through z.
/// Throws BoundaryPoint near the boundary and PreconditionViolated outside.
MinimalCapResult minimal_cap(const Polytope& p, const Vec& z, const CapSearch& search = {});

double v_at(const Polytope& p, const Vec& z, const CapSearch& search = {});

/// v(z), with zero on the boundary instead of an error.
double v_or_zero(const Polytope& p, const Vec& z);

/// Rigorous cheap bounds: lower <= v(z) <= upper.
struct VBounds {
  double lower = 0.0;
  double upper = 0.0;
};
VBounds v_bounds(const Polytope& p, const Vec& z, bool with_macbeath = true);

/// M(z, lambda) = z + lambda [(P - z) ∩ (z - P)] in H-representation.
struct MacbeathRegion {
  Vec z;
  double lambda = 1.0;
  std::vector<Halfspace> halfspaces;
  double volume = 0.0;

  bool contains(const Vec& x, double tol = kTauGeom) const;
};

/// Throws BoundaryPoint on the boundary and PreconditionViolated outside.
MacbeathRegion macbeath(const Polytope& p, const Vec& z, double lambda);

/// u(z) = V(M(z, 1)) without building the region object.
double macbeath_volume(const Polytope& p, const Vec& z);

/// Smallest mu with x ∈ M(z, mu).
double macbeath_gauge(const Polytope& p, const Vec& z, const Vec& x);

/// Half-spaces of M(z, lambda) for LP tests.
std::vector<Halfspace> macbeath_halfspaces(const Polytope& p, const Vec& z, double lambda);

bool floating_body_contains(const Polytope& p, const Vec& z, double t);

/// Membership in the wet part P(v <= s) via cheap bounds, then exact v.
bool in_wet_part(const Polytope& p, const Vec& x, double s);

struct Estimate {
  double value = 0.0;
  double se = 0.0;
};

Estimate wet_part_volume(const Polytope& p, double s, long budget, Rng& rng);

/// Point on the ray from the centroid with v = s (relative tolerance
/// kTauLevel). Throws LevelNotBracketed when no point of the ray reaches s.
struct LevelPoint {
  Vec z;
  double v = 0.0;
  Cap cap;  // minimal cap at z
};
LevelPoint boundary_point_at_level(const Polytope& p, const Vec& direction, double s);

/// Segment [x, z] avoids P(v >= T).
bool visible_set_contains(const Polytope& p, const Vec& z, double T, const Vec& x);

/// Largest v along [a, b]: 64 samples plus golden-section refinement.
double max_v_on_segment(const Polytope& p, const Vec& a, const Vec& b);

/// Some point of [a, b] has v >= T (same search, stops at the first hit).
bool segment_reaches_level(const Polytope& p, const Vec& a, const Vec& b, double T);

double superset_beta(int dim);

/// C^{beta T / v(z)}(z) with beta = 2 e d^3 + 1.
Cap visibility_superset(const Polytope& p, const Vec& z, double T);

/// Direction grid used by the minimal cap search (cached, deterministic).
const PointList& direction_grid(int dim, int count);

}  // namespace polylab
