#pragma once

#include "polylab/caps.hpp"
#include "polylab/hull.hpp"

#include <cstdint>
#include <vector>

namespace polylab {

/// Fast membership oracle for the floating body P(v >= s) and its wet part.
///
/// Level points along rays from the centroid give an inner polytope (their
/// hull lies in the convex floating body). Caps of volume just below s in the
/// minimal-cap directions of those points give outer half-spaces: a point
/// beyond one of them has v < s. A subdivision grid caches the verdict per
/// cell; points in undecided cells fall back to the exact v(z).
class LevelSet {
 public:
  LevelSet(const Polytope& p, double s, int rays = 0, int jobs = 1);

  double level() const { return s_; }
  bool empty() const { return empty_; }

  /// v(x) <= s for x in P.
  bool wet(const Vec& x) const;
  bool dry(const Vec& x) const { return !wet(x); }

  /// [a, b] ∩ P(v >= s) = ∅ for a, b in P.
  bool segment_avoids(const Vec& a, const Vec& b) const;

  /// Points with v = s (slightly above) along the rays.
  const std::vector<LevelPoint>& level_points() const { return points_; }
  const std::vector<Halfspace>& inner() const { return inner_; }
  const std::vector<Halfspace>& outer() const { return outer_; }

  /// Fraction of grid cells that needed no exact fallback (diagnostic).
  double decided_fraction() const;

 private:
  enum : std::uint8_t { kMixed = 0, kDry = 1, kWet = 2 };

  void build_grid();
  void classify(const Vec& lo, const Vec& hi, int depth, const std::vector<int>& inner_ids,
                const std::vector<int>& outer_ids, const std::vector<int>& cell_lo, int span);
  std::uint8_t quick(const Vec& x) const;
  std::size_t cell_of(const Vec& x) const;

  const Polytope* p_;
  double s_;
  bool empty_ = false;
  std::vector<LevelPoint> points_;
  std::vector<Halfspace> inner_;
  std::vector<Halfspace> outer_;
  Vec box_lo_, box_hi_;
  int res_ = 1;  // cells per axis
  int depth_ = 0;
  std::vector<std::uint8_t> grid_;
};

}  // namespace polylab
