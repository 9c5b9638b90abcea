#include "polylab/depgraph.hpp"

#include "polylab/parallel.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace polylab {

namespace {

constexpr std::uint64_t kStreamPool = 21;
constexpr std::uint64_t kStreamValidate = 22;
constexpr std::uint64_t kStreamInnerSample = 23;

std::string format_point(const Vec& x) {
  std::ostringstream out;
  out << "(";
  for (int j = 0; j < x.size(); ++j) out << (j ? ", " : "") << x[j];
  out << ")";
  return out.str();
}

[[noreturn]] void violated(int invariant, const Vec& x, const std::string& what) {
  throw Error(ErrorKind::CellInvariantViolated,
              "invariant " + std::to_string(invariant) + " at " + format_point(x) + ": " + what);
}

std::pair<int, int> nearest_pair(const PointList& a, const PointList& b) {
  std::pair<int, int> best{0, 0};
  double dist = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      const double d2 = (a[i] - b[j]).squaredNorm();
      if (d2 < dist) {
        dist = d2;
        best = {static_cast<int>(i), static_cast<int>(j)};
      }
    }
  }
  return best;
}

int nearest_to(const PointList& a, const Vec& x) {
  int best = 0;
  double dist = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d2 = (a[i] - x).squaredNorm();
    if (d2 < dist) {
      dist = d2;
      best = static_cast<int>(i);
    }
  }
  return best;
}

}  // namespace

double gamma_for(int dim) { return 3.0 * dim * dim * dim * std::pow(6.0, dim); }

double t_star_for(int dim, double T) { return dim * std::pow(6.0, dim) * T; }

int CellDecomposition::cell_of(const Vec& x) const {
  int best = 0;
  double mu = std::numeric_limits<double>::infinity();
  for (int j = 0; j < m(); ++j) {
    const double g = macbeath_gauge(*polytope, covering.elements[j].z, x);
    if (g < mu) {
      mu = g;
      best = j;
    }
  }
  return best;
}

bool CellDecomposition::trimmed(const Vec& x) const { return upper->wet(x); }

CellDecomposition build_cells(const Polytope& p, const CapCovering& covering, double T,
                              std::uint64_t seed, const CellOptions& options) {
  const int d = p.dim();
  const int m = covering.m();
  if (m == 0) throw Error(ErrorKind::LevelTooHigh, "empty covering");
  CellDecomposition cells;
  cells.polytope = &p;
  cells.covering = covering;
  cells.T = T;
  cells.T_star = t_star_for(d, T);
  cells.gamma = gamma_for(d);
  cells.upper = std::make_shared<const LevelSet>(p, cells.T_star, options.level_rays, options.jobs);
  for (int j = 0; j < m; ++j) cells.gamma_caps.push_back(covering.dilated(p, j, cells.gamma));

  // Invariants 1 and 3 on uniform samples of P.
  const auto n = static_cast<std::size_t>(options.validation_budget);
  parallel_for(n, options.jobs, [&](std::size_t k) {
    Rng rng = Rng::derive(seed, kStreamValidate, k);
    const Vec x = sample_uniform(p, rng);
    const int j = cells.cell_of(x);
    if (j < 0 || j >= m || !std::isfinite(macbeath_gauge(p, covering.elements[j].z, x)))
      violated(1, x, "no cell assigned");
    if (cells.trimmed(x) && !cells.gamma_caps[j].contains(x))
      violated(3, x, "trimmed cell " + std::to_string(j) + " leaves K_j^gamma");
  });
  // Invariant 2 on samples of each K'_j.
  const long per = std::max<long>(16, options.validation_budget / m);
  parallel_for(static_cast<std::size_t>(m), options.jobs, [&](std::size_t j) {
    std::vector<Halfspace> hs(p.facets().begin(), p.facets().end());
    hs.insert(hs.end(), covering.elements[j].inner.begin(), covering.elements[j].inner.end());
    const Polytope inner = from_halfspaces(hs, d);
    Rng rng = Rng::derive(seed, kStreamInnerSample, j);
    for (long k = 0; k < per; ++k) {
      const Vec x = sample_uniform(inner, rng);
      const int got = cells.cell_of(x);
      if (got != static_cast<int>(j))
        violated(2, x, "point of K'_" + std::to_string(j) + " assigned to " + std::to_string(got));
    }
  });
  cells.validated = options.validation_budget + per * m;

  // Point pool of the trimmed cells.
  cells.pool_draws = options.pool_per_cell * m;
  std::vector<int> label(static_cast<std::size_t>(cells.pool_draws), -1);
  PointList draws(label.size());
  parallel_for(label.size(), options.jobs, [&](std::size_t k) {
    Rng rng = Rng::derive(seed, kStreamPool, k);
    draws[k] = sample_uniform(p, rng);
    if (cells.trimmed(draws[k])) label[k] = cells.cell_of(draws[k]);
  });
  cells.pool.assign(m, {});
  for (std::size_t k = 0; k < label.size(); ++k)
    if (label[k] >= 0) cells.pool[label[k]].push_back(draws[k]);
  return cells;
}

bool visible_pair(const CellDecomposition& cells, const std::vector<PointList>& usable, int i,
                  int k, int budget, std::uint64_t seed) {
  if (i == k) return true;
  const int lo = std::min(i, k), hi = std::max(i, k);
  const PointList& a = usable[lo];
  const PointList& b = usable[hi];
  if (a.empty() || b.empty()) return false;
  const LevelSet& body = *cells.upper;
  // Deterministic probes: centers, closest pool pair, center to nearest.
  if (body.segment_avoids(a[0], b[0])) return true;
  const auto [pa, pb] = nearest_pair(a, b);
  if (body.segment_avoids(a[pa], b[pb])) return true;
  if (body.segment_avoids(a[0], b[nearest_to(b, a[0])])) return true;
  if (body.segment_avoids(a[nearest_to(a, b[0])], b[0])) return true;
  Rng rng = Rng::derive(seed, static_cast<std::uint64_t>(lo), static_cast<std::uint64_t>(hi));
  for (int t = 0; t < budget; ++t) {
    const Vec& x = a[rng.index(a.size())];
    const Vec& y = b[rng.index(b.size())];
    if (body.segment_avoids(x, y)) return true;
  }
  return false;
}

bool DependencyGraph::reflexive() const {
  for (int i = 0; i < m; ++i)
    if (!std::binary_search(L[i].begin(), L[i].end(), i)) return false;
  return true;
}

bool DependencyGraph::symmetric() const {
  for (int i = 0; i < m; ++i)
    for (int k : L[i])
      if (!std::binary_search(L[k].begin(), L[k].end(), i)) return false;
  return true;
}

bool DependencyGraph::degree_consistent() const {
  long bound = 0;
  for (int i = 0; i < m; ++i) {
    long sum = 0;
    for (int k : L[i]) sum += static_cast<long>(L[k].size());
    bound = std::max(bound, sum);
  }
  return D <= bound;
}

std::string DependencyGraph::to_json() const {
  nlohmann::json edge_list = nlohmann::json::array();
  for (const auto& [i, j] : edges) edge_list.push_back({i, j});
  std::vector<int> l_sizes;
  for (const auto& row : L) l_sizes.push_back(static_cast<int>(row.size()));
  nlohmann::json j{{"m", m},
                   {"edges", edge_list},
                   {"degrees", degrees},
                   {"D", D},
                   {"L_sizes", l_sizes},
                   {"probe_budget", probe_budget},
                   {"pairs_probed", pairs_probed}};
  return j.dump(2);
}

std::string DependencyGraph::to_dot() const {
  std::ostringstream out;
  out << "graph G {\n";
  for (int i = 0; i < m; ++i) out << "  " << i << ";\n";
  for (const auto& [i, j] : edges) out << "  " << i << " -- " << j << ";\n";
  out << "}\n";
  return out.str();
}

DependencyGraph build_graph(const CellDecomposition& cells, double s, std::uint64_t seed,
                            const GraphOptions& options) {
  const Polytope& p = *cells.polytope;
  const int m = cells.m();
  // Probe points: the center first, then pool points with v >= s.
  std::vector<PointList> usable(m);
  parallel_for(static_cast<std::size_t>(m), options.jobs, [&](std::size_t j) {
    usable[j].push_back(cells.covering.elements[j].z);
    for (const auto& x : cells.pool[j])
      if (!in_wet_part(p, x, s)) usable[j].push_back(x);
  });

  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < m; ++i)
    for (int k = i + 1; k < m; ++k) pairs.emplace_back(i, k);
  std::vector<std::uint8_t> seen(pairs.size(), 0);
  parallel_for(pairs.size(), options.jobs, [&](std::size_t t) {
    seen[t] = visible_pair(cells, usable, pairs[t].first, pairs[t].second, options.budget, seed);
  });

  DependencyGraph g;
  g.m = m;
  g.probe_budget = options.budget;
  g.pairs_probed = static_cast<long>(pairs.size());
  g.L.assign(m, {});
  for (int i = 0; i < m; ++i) g.L[i].push_back(i);
  for (std::size_t t = 0; t < pairs.size(); ++t) {
    if (!seen[t]) continue;
    g.L[pairs[t].first].push_back(pairs[t].second);
    g.L[pairs[t].second].push_back(pairs[t].first);
  }
  const std::size_t words = (static_cast<std::size_t>(m) + 63) / 64;
  std::vector<std::vector<std::uint64_t>> bits(m, std::vector<std::uint64_t>(words, 0));
  for (int i = 0; i < m; ++i) {
    std::sort(g.L[i].begin(), g.L[i].end());
    for (int k : g.L[i]) bits[i][k / 64] |= std::uint64_t{1} << (k % 64);
  }
  g.degrees.assign(m, 0);
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      bool shared = false;
      for (std::size_t w = 0; w < words && !shared; ++w) shared = (bits[i][w] & bits[j][w]) != 0;
      if (shared) {
        g.edges.emplace_back(i, j);
        ++g.degrees[i];
        ++g.degrees[j];
      }
    }
  }
  g.D = m == 0 ? 0 : *std::max_element(g.degrees.begin(), g.degrees.end());
  return g;
}

int count_SkLi(const DependencyGraph& graph, int i) {
  return static_cast<int>(graph.L[i].size());
}

}  // namespace polylab
