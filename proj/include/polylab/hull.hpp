#pragma once

#include "polylab/common.hpp"

#include <array>
#include <span>
#include <vector>

namespace polylab {

using VertexSet = std::vector<int>;  // sorted point indices
using FacesByDim = std::vector<std::vector<VertexSet>>;

struct HullFacet {
  VertexSet vertices;  // size >= d after coplanar merging
  Vec normal;          // outward unit normal
  double offset = 0.0;
};

/// Convex hull of a finite point set in R^d.
struct HullComplex {
  int dim = 0;
  std::vector<int> hull_vertices;  // sorted indices into the input
  std::vector<HullFacet> facets;
  // Simplicial facets before merging, d indices each; fan triangulation
  // towards `interior` gives the volume.
  std::vector<std::array<int, kMaxDim>> simplices;
  Vec interior;
  std::vector<long> f;  // f_0 .. f_{d-1}
  double volume = 0.0;
  bool degenerate = false;
  int affine_dim = 0;

  /// Faces of each dimension 0..d-1 as vertex sets (non-degenerate only).
  FacesByDim faces;
};

struct HullOptions {
  bool compute_faces = true;
};

/// Quickhull with conflict lists. Degenerate inputs are projected to their
/// affine hull; the result is flagged and has zero volume.
HullComplex convex_hull(std::span<const Vec> points, const HullOptions& options = {});

/// Throws DegenerateHull when the input did not span R^d.
std::vector<long> f_vector(const HullComplex& hull);

double hull_volume(const HullComplex& hull);

bool hull_contains(const HullComplex& hull, const Vec& x, double tol = kTauGeom);

/// Faces of every dimension from facet vertex sets: the k-faces are the
/// intersections G ∩ F of a (k+1)-face G with a facet F that have affine
/// rank k.
FacesByDim faces_from_facets(std::span<const Vec> points, const std::vector<VertexSet>& facets,
                             int dim);

/// Number of maximal chains F_0 ⊂ F_1 ⊂ ... ⊂ F_{d-1}.
long long count_flags(const FacesByDim& faces);

}  // namespace polylab
