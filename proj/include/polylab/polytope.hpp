#pragma once

#include "polylab/common.hpp"
#include "polylab/hull.hpp"
#include "polylab/rng.hpp"

#include <array>
#include <string>
#include <utility>
#include <vector>

namespace polylab {

struct FaceLattice {
  FacesByDim faces_by_dim;  // faces_by_dim[k][i]: sorted vertex indices of a k-face
  // incidence[k]: pairs (i, j) with faces_by_dim[k][i] ⊂ faces_by_dim[k+1][j]
  std::vector<std::vector<std::pair<int, int>>> incidence;
  long long flag_count = 0;

  std::vector<long> f_vector() const;
};

/// Full-dimensional convex polytope with both representations. Immutable
/// after construction and safe to share across threads.
class Polytope {
 public:
  int dim() const { return dim_; }
  const PointList& vertices() const { return vertices_; }
  const std::vector<Halfspace>& facets() const { return facets_; }
  // facet_vertices()[i]: sorted indices of vertices tight on facet i
  const std::vector<VertexSet>& facet_vertices() const { return facet_vertices_; }
  double volume() const { return volume_; }
  const Vec& centroid() const { return centroid_; }
  const FaceLattice& lattice() const { return lattice_; }

  /// 2D only: vertex indices in counterclockwise order.
  const std::vector<int>& ring() const { return ring_; }

  /// Simplices of the centroid fan: vertex indices of the facet simplex
  /// (the apex is the centroid).
  const std::vector<std::array<int, kMaxDim>>& fan() const { return fan_; }
  const std::vector<double>& fan_cumulative() const { return fan_cumulative_; }

  double width(const Vec& u) const;

  friend Polytope build_from_vertices(std::span<const Vec> points);

 private:
  int dim_ = 0;
  PointList vertices_;
  std::vector<Halfspace> facets_;
  std::vector<VertexSet> facet_vertices_;
  double volume_ = 0.0;
  Vec centroid_;
  FaceLattice lattice_;
  std::vector<int> ring_;
  std::vector<std::array<int, kMaxDim>> fan_;
  std::vector<double> fan_cumulative_;
};

/// Throws DegenerateInput when the points do not span R^d.
Polytope build_from_vertices(std::span<const Vec> points);

/// Bounded H-polytope {x : a_i . x <= b_i}.
Polytope from_halfspaces(std::span<const Halfspace> hs, int dim);

Polytope make_cube(int dim);
Polytope make_simplex(int dim);
Polytope make_cross_polytope(int dim);

/// "cube:2", "simplex:3", "cross-polytope:4", a JSON document
/// {"dim": d, "vertices": [...]}, or a path to such a file.
Polytope parse_polytope_spec(const std::string& spec);

/// Affine rescaling about the centroid to unit volume.
Polytope normalize(const Polytope& p);

long long flag_count(const Polytope& p);

double support(const Polytope& p, const Vec& u);

bool contains(const Polytope& p, const Vec& x, double tol = kTauGeom);

/// Signed distance to the boundary: min_i (b_i - a_i . x); negative outside.
double boundary_slack(const Polytope& p, const Vec& x);

Vec sample_uniform(const Polytope& p, Rng& rng);

/// V(P ∩ {x : u . x >= level}). Dimension-specific exact kernels.
double cap_volume_at(const Polytope& p, const Vec& u, double level);

/// V(P ∩ H) for an arbitrary half-space system added to the facets.
double clipped_volume(const Polytope& p, std::span<const Halfspace> extra);

}  // namespace polylab
