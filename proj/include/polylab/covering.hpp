#pragma once

#include "polylab/caps.hpp"
#include "polylab/level_set.hpp"

#include <cstdint>
#include <vector>

namespace polylab {

/// (2d)^{-2d}.
double s0_for(int dim);

/// Maximal-in-practice system of points on P(v = s) with pairwise disjoint
/// half Macbeath regions.
struct SaturatedSystem {
  int dim = 0;
  double s = 0.0;
  std::vector<LevelPoint> points;  // z_i with their minimal caps C(z_i)
  std::uint64_t seed = 0;
  int patience = 0;                // W
  long candidates = 0;             // rays tried
  int final_rejection_run = 0;     // consecutive rejections at termination
  bool within_s0 = true;           // s <= s0 V(P)
  int m() const { return static_cast<int>(points.size()); }
};

struct SaturateOptions {
  int patience = 200;
  long max_candidates = 200000;
};

/// Greedy construction along random rays from the centroid. Throws
/// LevelTooHigh when s exceeds max v.
SaturatedSystem saturate(const Polytope& p, double s, std::uint64_t seed,
                         const SaturateOptions& options = {});

/// M(z, lambda) ∩ M(w, lambda) = ∅: separating facet-normal axis first,
/// then an LP feasibility test.
bool macbeath_disjoint(const Polytope& p, const Vec& z, const Vec& w, double lambda);

struct CoveringElement {
  Vec z;
  Cap cap;    // C(z_i)
  Cap outer;  // K_i = C^6(z_i)
  std::vector<Halfspace> inner;  // K'_i = M(z_i, 1/2) ∩ C(z_i)
  double inner_volume = 0.0;
};

struct CapCovering {
  SaturatedSystem system;
  std::vector<CoveringElement> elements;

  int m() const { return static_cast<int>(elements.size()); }
  /// K_i^lambda = C^{6 lambda}(z_i).
  Cap dilated(const Polytope& p, int i, double lambda) const;
  bool inner_contains(int i, const Vec& x, double tol = kTauGeom) const;
};

CapCovering cap_covering(const Polytope& p, const SaturatedSystem& system);

struct BoundCheck {
  int pass = 0;
  int total = 0;
  double worst_low = 0.0;   // min ratio V / lower bound
  double worst_high = 0.0;  // max ratio V / upper bound
};

struct CoveringReport {
  double level = 0.0;
  int m = 0;
  bool within_s0 = true;
  BoundCheck outer_bounds;  // s <= V(K_i) <= 6^d s
  BoundCheck inner_bounds;  // (6d)^{-d} s <= V(K'_i) <= 2^{-d} s
  double coverage_fraction = 0.0;  // wet points inside some K_i
  double inner_fraction = 0.0;     // K'_i points inside the wet part
  double small_cap_fraction = 0.0; // small caps inside some K_i^{3d}
  double lambda_cover_fraction = 0.0;   // P(v <= 2s) inside the union of K_i^{6 d^2}
  double wet_volume = 0.0;
  double wet_volume_se = 0.0;
  double m_lower = 0.0;  // usual volume arguments
  double m_upper = 0.0;
  bool m_within_bounds = false;
  long budget = 0;
  std::uint64_t seed = 0;
  int patience = 0;
  long candidates = 0;

  bool all_pass() const;
};

struct VerifyOptions {
  long budget = 10000;
  int small_caps = 1000;
  double lambda = 2.0;
  int jobs = 1;
};

CoveringReport verify_covering(const Polytope& p, const CapCovering& covering, std::uint64_t seed,
                               const VerifyOptions& options = {});

std::string covering_report_json(const CoveringReport& report);

int count_Z_in_cap(const SaturatedSystem& system, const Cap& cap);

/// Every level point of P(v >= T*) lies in the hull of the picks.
bool convexhull_sandwich_witness(const PointList& picks, const LevelSet& floating_body);

}  // namespace polylab
