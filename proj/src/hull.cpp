#include "polylab/hull.hpp"

#include "polylab/kernel.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <unordered_map>

namespace polylab {

namespace {

using Key = std::array<int, kMaxDim>;

struct KeyHash {
  std::size_t operator()(const Key& k) const noexcept {
    std::size_t h = 1469598103934665603ull;
    for (int x : k) h = (h ^ static_cast<std::size_t>(x + 1)) * 1099511628211ull;
    return h;
  }
};

struct Facet {
  Key v{};
  Key nb{};
  Vec normal;
  double offset = 0.0;
  std::vector<int> outside;
  int furthest = -1;
  double furthest_dist = 0.0;
  bool alive = true;
  int mark = 0;
};

class Quickhull {
 public:
  Quickhull(std::span<const Vec> pts, int d, double eps) : pts_(pts), d_(d), eps_(eps) {}

  // Returns false if the input does not span R^d.
  bool run(std::vector<int>& simplex_out) {
    std::vector<int> init;
    if (!initial_simplex(init)) {
      simplex_out = init;
      return false;
    }
    interior_ = Vec::Zero(d_);
    for (int i : init) interior_ += pts_[i];
    interior_ /= static_cast<double>(d_ + 1);

    // One facet opposite each simplex vertex.
    for (int skip = 0; skip <= d_; ++skip) {
      Facet f;
      f.v.fill(-1);
      f.nb.fill(-1);
      for (int j = 0, c = 0; j <= d_; ++j)
        if (j != skip) f.v[c++] = init[j];
      orient(f);
      facets_.push_back(std::move(f));
    }
    // Facet opposite init[a] and facet opposite init[b] share the ridge
    // missing both; position of init[b] in facet a gets neighbor b.
    for (int a = 0; a <= d_; ++a) {
      for (int p = 0; p < d_; ++p) {
        const int vid = facets_[a].v[p];
        const int b = static_cast<int>(std::find(init.begin(), init.end(), vid) - init.begin());
        facets_[a].nb[p] = b;
      }
    }
    std::vector<char> used(pts_.size(), 0);
    for (int i : init) used[i] = 1;
    std::vector<int> all;
    all.reserve(pts_.size());
    for (int i = 0; i < static_cast<int>(pts_.size()); ++i)
      if (!used[i]) all.push_back(i);
    std::vector<int> fresh(d_ + 1);
    std::iota(fresh.begin(), fresh.end(), 0);
    partition(all, fresh);

    std::vector<int> work = fresh;
    while (!work.empty()) {
      const int fi = work.back();
      work.pop_back();
      if (!facets_[fi].alive || facets_[fi].outside.empty()) continue;
      add_point(fi, work);
    }
    return true;
  }

  const std::vector<Facet>& facets() const { return facets_; }
  const Vec& interior() const { return interior_; }

 private:
  double dist(const Facet& f, int p) const { return f.normal.dot(pts_[p]) - f.offset; }

  void orient(Facet& f) {
    std::array<Vec, kMaxDim> buf;
    for (int j = 0; j < d_; ++j) buf[j] = pts_[f.v[j]];
    Vec n = hyperplane_normal(std::span<const Vec>(buf.data(), d_));
    n.normalize();
    double b = n.dot(buf[0]);
    if (n.dot(interior_) - b > 0) {
      n = -n;
      b = -b;
    }
    f.normal = n;
    f.offset = b;
  }

  bool initial_simplex(std::vector<int>& init) {
    const int n = static_cast<int>(pts_.size());
    init.clear();
    if (n == 0) return false;
    int lo = 0;
    for (int i = 1; i < n; ++i)
      if (pts_[i][0] < pts_[lo][0]) lo = i;
    init.push_back(lo);
    std::vector<Vec> basis;
    while (static_cast<int>(init.size()) <= d_) {
      double best = -1.0;
      int best_i = -1;
      for (int i = 0; i < n; ++i) {
        Vec r = pts_[i] - pts_[init[0]];
        for (const auto& e : basis) r -= e.dot(r) * e;
        const double dn = r.norm();
        if (dn > best) {
          best = dn;
          best_i = i;
        }
      }
      if (best <= eps_) return false;
      Vec r = pts_[best_i] - pts_[init[0]];
      for (const auto& e : basis) r -= e.dot(r) * e;
      basis.push_back(r / r.norm());
      init.push_back(best_i);
    }
    return true;
  }

  void partition(const std::vector<int>& pts, const std::vector<int>& targets) {
    for (int p : pts) {
      for (int fi : targets) {
        Facet& f = facets_[fi];
        const double dd = dist(f, p);
        if (dd > eps_) {
          f.outside.push_back(p);
          if (dd > f.furthest_dist) {
            f.furthest_dist = dd;
            f.furthest = p;
          }
          break;
        }
      }
    }
  }

  void add_point(int start, std::vector<int>& work) {
    const int eye = facets_[start].furthest;
    ++stamp_;
    std::vector<int> visible{start};
    facets_[start].mark = stamp_;
    struct Horizon {
      int facet;
      int pos;
    };
    std::vector<Horizon> horizon;
    for (std::size_t q = 0; q < visible.size(); ++q) {
      const int fi = visible[q];
      for (int p = 0; p < d_; ++p) {
        const int nb = facets_[fi].nb[p];
        if (facets_[nb].mark == stamp_) continue;
        if (dist(facets_[nb], eye) > eps_) {
          facets_[nb].mark = stamp_;
          visible.push_back(nb);
        } else {
          horizon.push_back({fi, p});
        }
      }
    }
    std::vector<int> created;
    created.reserve(horizon.size());
    std::unordered_map<Key, std::pair<int, int>, KeyHash> ridges;
    for (const auto& h : horizon) {
      const Facet& old = facets_[h.facet];
      const int across = old.nb[h.pos];
      Facet nf;
      nf.v = old.v;
      nf.v[h.pos] = eye;
      nf.nb.fill(-1);
      nf.nb[h.pos] = across;
      orient(nf);
      const int id = static_cast<int>(facets_.size());
      Facet& a = facets_[across];
      for (int j = 0; j < d_; ++j)
        if (a.nb[j] == h.facet) a.nb[j] = id;
      facets_.push_back(std::move(nf));
      created.push_back(id);
      for (int p = 0; p < d_; ++p) {
        if (p == h.pos) continue;
        Key k;
        k.fill(-1);
        for (int j = 0, c = 0; j < d_; ++j)
          if (j != p) k[c++] = facets_[id].v[j];
        std::sort(k.begin(), k.begin() + (d_ - 1));
        auto it = ridges.find(k);
        if (it == ridges.end()) {
          ridges.emplace(k, std::make_pair(id, p));
        } else {
          facets_[id].nb[p] = it->second.first;
          facets_[it->second.first].nb[it->second.second] = id;
          ridges.erase(it);
        }
      }
    }
    std::vector<int> orphans;
    for (int fi : visible) {
      Facet& f = facets_[fi];
      f.alive = false;
      for (int p : f.outside)
        if (p != eye) orphans.push_back(p);
      f.outside.clear();
      f.outside.shrink_to_fit();
    }
    partition(orphans, created);
    for (int id : created)
      if (!facets_[id].outside.empty()) work.push_back(id);
  }

  std::span<const Vec> pts_;
  int d_;
  double eps_;
  Vec interior_;
  std::vector<Facet> facets_;
  int stamp_ = 0;
};

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

double extent_of(std::span<const Vec> pts) {
  double s = 1.0;
  for (const auto& p : pts) s = std::max(s, p.cwiseAbs().maxCoeff());
  return s;
}

// Hull of a degenerate set: project to the affine hull and recurse.
HullComplex degenerate_hull(std::span<const Vec> pts, int d, const HullOptions& options) {
  HullComplex out;
  out.dim = d;
  out.degenerate = true;
  out.volume = 0.0;
  out.f.assign(d, 0);
  out.interior = Vec::Zero(d);
  if (pts.empty()) return out;
  int rank = 0;
  const double eps = kTauGeom * extent_of(pts);
  const Mat basis = affine_basis(pts, rank, eps);
  out.affine_dim = rank;
  for (const auto& p : pts) out.interior += p;
  out.interior /= static_cast<double>(pts.size());
  if (rank == 0) {
    out.hull_vertices = {0};
    out.f[0] = 1;
    return out;
  }
  PointList proj;
  proj.reserve(pts.size());
  for (const auto& p : pts) proj.push_back(basis * (p - pts[0]));
  if (rank == 1) {
    int lo = 0, hi = 0;
    for (int i = 1; i < static_cast<int>(proj.size()); ++i) {
      if (proj[i][0] < proj[lo][0]) lo = i;
      if (proj[i][0] > proj[hi][0]) hi = i;
    }
    out.hull_vertices = {std::min(lo, hi), std::max(lo, hi)};
    out.f[0] = 2;
    if (d > 1) out.f[1] = 1;
    const Vec dir = basis.row(0).transpose();
    out.facets.push_back({{hi}, dir, dir.dot(pts[hi])});
    out.facets.push_back({{lo}, Vec(-dir), -dir.dot(pts[lo])});
    return out;
  }
  HullComplex sub = convex_hull(proj, options);
  out.hull_vertices = sub.hull_vertices;
  for (int k = 0; k < rank; ++k) out.f[k] = sub.f[k];
  if (rank < d) out.f[rank] = 1;
  for (const auto& sf : sub.facets) {
    HullFacet f;
    f.vertices = sf.vertices;
    f.normal = basis.transpose() * sf.normal;
    f.offset = sf.offset + f.normal.dot(pts[0]);
    out.facets.push_back(std::move(f));
  }
  return out;
}

}  // namespace

FacesByDim faces_from_facets(std::span<const Vec> points, const std::vector<VertexSet>& facets,
                             int dim) {
  FacesByDim faces(dim);
  faces[dim - 1] = facets;
  for (auto& f : faces[dim - 1]) std::sort(f.begin(), f.end());
  bool simplicial = true;
  for (const auto& f : facets) simplicial = simplicial && static_cast<int>(f.size()) == dim;
  if (simplicial) {
    // Every k-face is a (k+1)-subset of some facet.
    for (int k = dim - 2; k >= 0; --k) {
      std::set<VertexSet> found;
      for (const auto& g : faces[k + 1]) {
        for (std::size_t drop = 0; drop < g.size(); ++drop) {
          VertexSet h;
          h.reserve(g.size() - 1);
          for (std::size_t j = 0; j < g.size(); ++j)
            if (j != drop) h.push_back(g[j]);
          found.insert(std::move(h));
        }
      }
      faces[k].assign(found.begin(), found.end());
    }
    return faces;
  }
  std::map<int, std::vector<int>> vertex_facets;
  for (int fi = 0; fi < static_cast<int>(facets.size()); ++fi)
    for (int v : faces[dim - 1][fi]) vertex_facets[v].push_back(fi);
  for (int k = dim - 2; k >= 0; --k) {
    std::set<VertexSet> found;
    for (const auto& g : faces[k + 1]) {
      std::set<int> candidates;
      for (int v : g)
        for (int fi : vertex_facets[v]) candidates.insert(fi);
      for (int fi : candidates) {
        const auto& f = faces[dim - 1][fi];
        if (std::includes(f.begin(), f.end(), g.begin(), g.end())) continue;
        VertexSet h;
        std::set_intersection(g.begin(), g.end(), f.begin(), f.end(), std::back_inserter(h));
        if (static_cast<int>(h.size()) < k + 1) continue;
        PointList hp;
        hp.reserve(h.size());
        for (int v : h) hp.push_back(points[v]);
        if (affine_rank(hp, kTauGeom * extent_of(hp)) == k) found.insert(std::move(h));
      }
    }
    faces[k].assign(found.begin(), found.end());
  }
  return faces;
}

long long count_flags(const FacesByDim& faces) {
  const int dim = static_cast<int>(faces.size());
  if (dim == 0) return 0;
  std::vector<long long> prev(faces[0].size(), 1);
  for (int k = 1; k < dim; ++k) {
    std::map<int, std::vector<int>> by_vertex;
    for (int h = 0; h < static_cast<int>(faces[k - 1].size()); ++h)
      by_vertex[faces[k - 1][h].front()].push_back(h);
    std::vector<long long> cur(faces[k].size(), 0);
    for (std::size_t g = 0; g < faces[k].size(); ++g) {
      const auto& gs = faces[k][g];
      for (int v : gs) {
        auto it = by_vertex.find(v);
        if (it == by_vertex.end()) continue;
        for (int h : it->second) {
          const auto& hs = faces[k - 1][h];
          if (std::includes(gs.begin(), gs.end(), hs.begin(), hs.end())) cur[g] += prev[h];
        }
      }
    }
    prev = std::move(cur);
  }
  return std::accumulate(prev.begin(), prev.end(), 0LL);
}

HullComplex convex_hull(std::span<const Vec> points, const HullOptions& options) {
  if (points.empty()) return degenerate_hull(points, 0, options);
  const int d = static_cast<int>(points[0].size());
  const double eps = kTauGeom * extent_of(points);
  if (static_cast<int>(points.size()) <= d) return degenerate_hull(points, d, options);

  Quickhull qh(points, d, eps);
  std::vector<int> init;
  if (!qh.run(init)) return degenerate_hull(points, d, options);

  HullComplex out;
  out.dim = d;
  out.affine_dim = d;
  out.interior = qh.interior();
  const auto& raw = qh.facets();
  std::vector<int> alive;
  std::vector<int> local(raw.size(), -1);
  for (int i = 0; i < static_cast<int>(raw.size()); ++i) {
    if (!raw[i].alive) continue;
    local[i] = static_cast<int>(alive.size());
    alive.push_back(i);
  }

  double volume = 0.0;
  std::array<Vec, kMaxDim + 1> buf;
  for (int fi : alive) {
    const Facet& f = raw[fi];
    std::array<int, kMaxDim> s{};
    s.fill(-1);
    for (int j = 0; j < d; ++j) {
      s[j] = f.v[j];
      buf[j] = points[f.v[j]];
    }
    buf[d] = out.interior;
    volume += simplex_volume(std::span<const Vec>(buf.data(), d + 1));
    out.simplices.push_back(s);
  }
  out.volume = volume;

  // Merge adjacent coplanar simplicial facets.
  UnionFind uf(static_cast<int>(alive.size()));
  const double merge_tol = 10.0 * eps;
  for (int a = 0; a < static_cast<int>(alive.size()); ++a) {
    const Facet& fa = raw[alive[a]];
    for (int p = 0; p < d; ++p) {
      const int b = local[fa.nb[p]];
      if (b < 0 || b <= a) continue;
      const Facet& fb = raw[alive[b]];
      bool coplanar = (fa.normal - fb.normal).cwiseAbs().maxCoeff() < 1e-6;
      for (int j = 0; j < d && coplanar; ++j) {
        coplanar = std::fabs(fa.normal.dot(points[fb.v[j]]) - fa.offset) <= merge_tol &&
                   std::fabs(fb.normal.dot(points[fa.v[j]]) - fb.offset) <= merge_tol;
      }
      if (coplanar) uf.unite(a, b);
    }
  }
  std::map<int, int> group_index;
  for (int a = 0; a < static_cast<int>(alive.size()); ++a) {
    const int root = uf.find(a);
    auto [it, inserted] = group_index.emplace(root, static_cast<int>(out.facets.size()));
    if (inserted) {
      HullFacet hf;
      hf.normal = raw[alive[root]].normal;
      hf.offset = raw[alive[root]].offset;
      out.facets.push_back(std::move(hf));
    }
    auto& hf = out.facets[it->second];
    for (int j = 0; j < d; ++j) hf.vertices.push_back(raw[alive[a]].v[j]);
  }
  for (auto& hf : out.facets) {
    std::sort(hf.vertices.begin(), hf.vertices.end());
    hf.vertices.erase(std::unique(hf.vertices.begin(), hf.vertices.end()), hf.vertices.end());
  }

  // A point on merged facets is a vertex only if its facet normals span R^d.
  std::map<int, std::vector<int>> incident;
  for (int fi = 0; fi < static_cast<int>(out.facets.size()); ++fi)
    for (int v : out.facets[fi].vertices) incident[v].push_back(fi);
  std::set<int> spurious;
  if (out.facets.size() != alive.size()) {
    for (const auto& [v, fs] : incident) {
      PointList normals{Vec::Zero(d)};
      for (int fi : fs) normals.push_back(out.facets[fi].normal);
      if (affine_rank(normals, 1e-6) < d) spurious.insert(v);
    }
  }
  for (const auto& [v, fs] : incident)
    if (!spurious.count(v)) out.hull_vertices.push_back(v);
  if (!spurious.empty()) {
    for (auto& hf : out.facets) {
      std::erase_if(hf.vertices, [&](int v) { return spurious.count(v) > 0; });
    }
  }

  out.f.assign(d, 0);
  out.f[0] = static_cast<long>(out.hull_vertices.size());
  out.f[d - 1] = static_cast<long>(out.facets.size());
  if (options.compute_faces || d > 2) {
    std::vector<VertexSet> fsets;
    fsets.reserve(out.facets.size());
    for (const auto& hf : out.facets) fsets.push_back(hf.vertices);
    out.faces = faces_from_facets(points, fsets, d);
    for (int k = 0; k < d; ++k) out.f[k] = static_cast<long>(out.faces[k].size());
  }
  return out;
}

std::vector<long> f_vector(const HullComplex& hull) {
  if (hull.degenerate) throw Error(ErrorKind::DegenerateHull, "hull does not span the space");
  return hull.f;
}

double hull_volume(const HullComplex& hull) { return hull.degenerate ? 0.0 : hull.volume; }

bool hull_contains(const HullComplex& hull, const Vec& x, double tol) {
  if (hull.degenerate) return false;
  for (const auto& f : hull.facets)
    if (f.normal.dot(x) > f.offset + tol) return false;
  return true;
}

}  // namespace polylab
