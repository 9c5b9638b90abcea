#pragma once

#include "polylab/covering.hpp"
#include "polylab/level_set.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace polylab {

/// Cells S_j around a covering at level T, with trimmed cells
/// S'_j = S_j ∩ P(v <= T*).
///
/// x belongs to the cell j minimizing the Macbeath gauge of x about z_j
/// (ties go to the smallest j). The point pool holds uniform draws of P that
/// fall in P(v <= T*), grouped by cell; it feeds the visibility probes and
/// the missed-volume estimates.
struct CellDecomposition {
  const Polytope* polytope = nullptr;
  CapCovering covering;
  double T = 0.0;
  double T_star = 0.0;
  double gamma = 0.0;
  std::shared_ptr<const LevelSet> upper;  // P(v >= T*)
  std::vector<Cap> gamma_caps;            // K_j^gamma
  std::vector<PointList> pool;            // pool[j] ⊂ S'_j
  long pool_draws = 0;                    // uniform draws behind the pool
  long validated = 0;                     // validation samples checked

  int m() const { return covering.m(); }
  int cell_of(const Vec& x) const;
  /// x ∈ P(v <= T*).
  bool trimmed(const Vec& x) const;
};

struct CellOptions {
  long validation_budget = 10000;
  long pool_per_cell = 4096;
  int level_rays = 0;
  int jobs = 1;
};

double gamma_for(int dim);
double t_star_for(int dim, double T);

/// Throws CellInvariantViolated with the offending point and invariant id.
CellDecomposition build_cells(const Polytope& p, const CapCovering& covering, double T,
                              std::uint64_t seed, const CellOptions& options = {});

/// A witness pair a ∈ S'_i, b ∈ S'_k, both with v >= s, whose segment avoids
/// P(v >= T*). One-sided: false means no witness among the probes.
bool visible_pair(const CellDecomposition& cells, const std::vector<PointList>& usable, int i,
                  int k, int budget, std::uint64_t seed);

struct DependencyGraph {
  int m = 0;
  std::vector<std::vector<int>> L;  // L[i]: sorted k with S'_k ⊂ L_i
  std::vector<std::pair<int, int>> edges;
  std::vector<int> degrees;
  int D = 0;
  int probe_budget = 0;
  long pairs_probed = 0;

  bool reflexive() const;
  bool symmetric() const;
  /// D <= max_i sum_{k in L_i} |L_k|.
  bool degree_consistent() const;

  std::string to_json() const;
  std::string to_dot() const;
};

struct GraphOptions {
  int budget = 256;
  int jobs = 1;
};

DependencyGraph build_graph(const CellDecomposition& cells, double s, std::uint64_t seed,
                            const GraphOptions& options = {});

int count_SkLi(const DependencyGraph& graph, int i);

}  // namespace polylab
