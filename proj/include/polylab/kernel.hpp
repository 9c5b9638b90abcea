#pragma once

#include "polylab/common.hpp"

#include <optional>
#include <span>

namespace polylab {

/// Unnormalized normal of the hyperplane through d points in R^d
/// (generalized cross product of the edge vectors from pts[0]).
Vec hyperplane_normal(std::span<const Vec> pts);

/// Affine rank of a point set: dimension of its affine hull.
int affine_rank(std::span<const Vec> pts, double tol = kTauGeom);

/// |det(p1-p0, ..., pd-p0)| / d!
double simplex_volume(std::span<const Vec> pts);

/// Orthonormal basis of the affine hull directions (rows) and the rank.
Mat affine_basis(std::span<const Vec> pts, int& rank, double tol = kTauGeom);

/// Volume of {x : a_i . x <= b_i} by recursive facet decomposition
/// (Lasserre). Redundant and duplicated constraints are allowed; the set
/// must be bounded. `origin` should lie near the body for conditioning.
double halfspace_volume(std::span<const Halfspace> hs, int dim, const Vec& origin);

/// Largest t such that {a_i . x + t*|a_i| <= b_i} is feasible, together with
/// the maximizer. The set is nonempty iff t >= -tol. Returns nullopt when the
/// system has no constraints bounding t (never happens for polytopes).
struct ChebyshevResult {
  double radius = 0.0;
  Vec center;
};
std::optional<ChebyshevResult> chebyshev_center(std::span<const Halfspace> hs, int dim);

/// Nonempty intersection test for a half-space system.
bool halfspaces_feasible(std::span<const Halfspace> hs, int dim, double tol = kTauGeom);

/// Vertices of a bounded H-polytope by brute-force enumeration of d-subsets
/// of constraints (intended for d <= 4 and modest constraint counts).
PointList enumerate_vertices(std::span<const Halfspace> hs, int dim, double tol = 1e-9);

}  // namespace polylab
