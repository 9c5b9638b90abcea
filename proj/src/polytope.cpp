#include "polylab/polytope.hpp"

#include "polylab/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace polylab {

std::vector<long> FaceLattice::f_vector() const {
  std::vector<long> f;
  for (const auto& level : faces_by_dim) f.push_back(static_cast<long>(level.size()));
  return f;
}

double Polytope::width(const Vec& u) const {
  double hi = -std::numeric_limits<double>::infinity();
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& v : vertices_) {
    const double x = u.dot(v);
    hi = std::max(hi, x);
    lo = std::min(lo, x);
  }
  return hi - lo;
}

Polytope build_from_vertices(std::span<const Vec> points) {
  if (points.empty()) throw Error(ErrorKind::DegenerateInput, "empty point set");
  const int d = static_cast<int>(points[0].size());
  if (d < 2 || d > kMaxDim) {
    throw Error(ErrorKind::DegenerateInput, "dimension must lie in [2, " +
                                                std::to_string(kMaxDim) + "]");
  }
  if (static_cast<int>(points.size()) < d + 1) {
    throw Error(ErrorKind::DegenerateInput, "need at least d+1 points");
  }
  HullOptions no_faces;
  no_faces.compute_faces = false;
  const HullComplex first = convex_hull(points, no_faces);
  if (first.degenerate) {
    throw Error(ErrorKind::DegenerateInput, "points lie in a hyperplane");
  }

  Polytope p;
  p.dim_ = d;
  for (int i : first.hull_vertices) p.vertices_.push_back(points[i]);

  // Rebuild on the true vertices so every index refers to a vertex.
  const HullComplex hull = convex_hull(p.vertices_);
  if (hull.degenerate || hull.hull_vertices.size() != p.vertices_.size()) {
    throw Error(ErrorKind::DegenerateInput, "unstable vertex set");
  }
  for (const auto& f : hull.facets) {
    p.facets_.push_back({f.normal, f.offset});
    p.facet_vertices_.push_back(f.vertices);
  }

  // Volume-weighted centroid from the hull's own fan.
  std::array<Vec, kMaxDim + 1> buf;
  Vec weighted = Vec::Zero(d);
  double total = 0.0;
  for (const auto& s : hull.simplices) {
    Vec mean = hull.interior;
    for (int j = 0; j < d; ++j) {
      buf[j] = p.vertices_[s[j]];
      mean += buf[j];
    }
    buf[d] = hull.interior;
    const double vol = simplex_volume(std::span<const Vec>(buf.data(), d + 1));
    weighted += vol * mean / static_cast<double>(d + 1);
    total += vol;
  }
  p.centroid_ = weighted / total;

  // Centroid fan for sampling and cap kernels.
  double acc = 0.0;
  for (const auto& s : hull.simplices) {
    for (int j = 0; j < d; ++j) buf[j] = p.vertices_[s[j]];
    buf[d] = p.centroid_;
    const double vol = simplex_volume(std::span<const Vec>(buf.data(), d + 1));
    if (vol <= 0.0) continue;
    acc += vol;
    p.fan_.push_back(s);
    p.fan_cumulative_.push_back(acc);
  }
  p.volume_ = acc;
  if (!(p.volume_ > 0.0)) throw Error(ErrorKind::DegenerateInput, "zero volume");

  if (d == 2) {
    p.ring_.resize(p.vertices_.size());
    std::iota(p.ring_.begin(), p.ring_.end(), 0);
    std::vector<double> angle(p.vertices_.size());
    for (std::size_t i = 0; i < p.vertices_.size(); ++i) {
      const Vec r = p.vertices_[i] - p.centroid_;
      angle[i] = std::atan2(r[1], r[0]);
    }
    std::sort(p.ring_.begin(), p.ring_.end(), [&](int a, int b) { return angle[a] < angle[b]; });
  }

  FaceLattice& lat = p.lattice_;
  lat.faces_by_dim = hull.faces;
  lat.incidence.resize(d - 1);
  for (int k = 0; k + 1 < d; ++k) {
    std::map<int, std::vector<int>> by_vertex;
    for (int j = 0; j < static_cast<int>(lat.faces_by_dim[k + 1].size()); ++j)
      for (int v : lat.faces_by_dim[k + 1][j]) by_vertex[v].push_back(j);
    for (int i = 0; i < static_cast<int>(lat.faces_by_dim[k].size()); ++i) {
      const auto& small = lat.faces_by_dim[k][i];
      for (int j : by_vertex[small.front()]) {
        const auto& big = lat.faces_by_dim[k + 1][j];
        if (std::includes(big.begin(), big.end(), small.begin(), small.end()))
          lat.incidence[k].emplace_back(i, j);
      }
    }
  }
  lat.flag_count = count_flags(lat.faces_by_dim);
  return p;
}

Polytope from_halfspaces(std::span<const Halfspace> hs, int dim) {
  const PointList verts = enumerate_vertices(hs, dim);
  if (static_cast<int>(verts.size()) < dim + 1) {
    throw Error(ErrorKind::DegenerateInput, "half-space system is empty or lower dimensional");
  }
  return build_from_vertices(verts);
}

Polytope make_cube(int dim) {
  PointList pts;
  for (int mask = 0; mask < (1 << dim); ++mask) {
    Vec v(dim);
    for (int j = 0; j < dim; ++j) v[j] = (mask >> j) & 1;
    pts.push_back(v);
  }
  return build_from_vertices(pts);
}

Polytope make_simplex(int dim) {
  PointList pts{Vec::Zero(dim)};
  for (int j = 0; j < dim; ++j) {
    Vec e = Vec::Zero(dim);
    e[j] = 1.0;
    pts.push_back(e);
  }
  return build_from_vertices(pts);
}

Polytope make_cross_polytope(int dim) {
  PointList pts;
  for (int j = 0; j < dim; ++j) {
    for (double sgn : {1.0, -1.0}) {
      Vec e = Vec::Zero(dim);
      e[j] = sgn;
      pts.push_back(e);
    }
  }
  return build_from_vertices(pts);
}

Polytope normalize(const Polytope& p) {
  const double scale = std::pow(p.volume(), -1.0 / p.dim());
  PointList pts;
  for (const auto& v : p.vertices()) pts.push_back(p.centroid() + scale * (v - p.centroid()));
  return build_from_vertices(pts);
}

long long flag_count(const Polytope& p) { return p.lattice().flag_count; }

double support(const Polytope& p, const Vec& u) {
  double h = -std::numeric_limits<double>::infinity();
  for (const auto& v : p.vertices()) h = std::max(h, u.dot(v));
  return h;
}

bool contains(const Polytope& p, const Vec& x, double tol) {
  for (const auto& f : p.facets())
    if (f.normal.dot(x) > f.offset + tol) return false;
  return true;
}

double boundary_slack(const Polytope& p, const Vec& x) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& f : p.facets()) m = std::min(m, f.slack(x));
  return m;
}

Vec sample_uniform(const Polytope& p, Rng& rng) {
  const auto& cum = p.fan_cumulative();
  const double target = rng.uniform() * cum.back();
  const std::size_t k =
      std::min<std::size_t>(std::upper_bound(cum.begin(), cum.end(), target) - cum.begin(),
                            cum.size() - 1);
  const int d = p.dim();
  std::array<double, kMaxDim + 1> cuts;
  for (int j = 0; j < d; ++j) cuts[j] = rng.uniform();
  std::sort(cuts.begin(), cuts.begin() + d);
  Vec x = cuts[0] * p.centroid();
  const auto& s = p.fan()[k];
  for (int j = 0; j < d; ++j) {
    const double hi = (j + 1 < d) ? cuts[j + 1] : 1.0;
    x += (hi - cuts[j]) * p.vertices()[s[j]];
  }
  return x;
}

namespace {

double polygon_cap_area(const Polytope& p, const Vec& u, double level) {
  const auto& ring = p.ring();
  const auto& v = p.vertices();
  const int n = static_cast<int>(ring.size());
  // Sutherland-Hodgman against u.x >= level with on-the-fly shoelace.
  double twice = 0.0;
  bool have_first = false;
  double fx = 0, fy = 0, px = 0, py = 0;
  auto emit = [&](double x, double y) {
    if (!have_first) {
      fx = x;
      fy = y;
      have_first = true;
    } else {
      twice += px * y - py * x;
    }
    px = x;
    py = y;
  };
  const double u0 = u[0], u1 = u[1];
  double ax = v[ring[n - 1]][0], ay = v[ring[n - 1]][1];
  double ha = u0 * ax + u1 * ay - level;
  for (int i = 0; i < n; ++i) {
    const double bx = v[ring[i]][0], by = v[ring[i]][1];
    const double hb = u0 * bx + u1 * by - level;
    if ((ha >= 0) != (hb >= 0)) {
      const double t = ha / (ha - hb);
      emit(ax + t * (bx - ax), ay + t * (by - ay));
    }
    if (hb >= 0) emit(bx, by);
    ax = bx;
    ay = by;
    ha = hb;
  }
  if (!have_first) return 0.0;
  twice += px * fy - py * fx;
  return 0.5 * std::fabs(twice);
}

using V3 = Eigen::Vector3d;

double tet_volume(const V3& a, const V3& b, const V3& c, const V3& d) {
  return std::fabs((b - a).dot((c - a).cross(d - a))) / 6.0;
}

// Volume of tet ∩ {h >= 0} where h is affine with vertex values hv.
double clipped_tet(const std::array<V3, 4>& p, const std::array<double, 4>& hv, double vol) {
  std::array<int, 4> in{}, out{};
  int ni = 0, no = 0;
  for (int i = 0; i < 4; ++i) {
    if (hv[i] > 0) in[ni++] = i;
    else out[no++] = i;
  }
  if (ni == 0) return 0.0;
  if (ni == 4) return vol;
  if (ni == 1) {
    const int a = in[0];
    double r = vol;
    for (int j = 0; j < 3; ++j) r *= hv[a] / (hv[a] - hv[out[j]]);
    return r;
  }
  if (ni == 3) {
    const int o = out[0];
    double r = vol;
    for (int j = 0; j < 3; ++j) r *= -hv[o] / (hv[in[j]] - hv[o]);
    return vol - r;
  }
  const int a = in[0], b = in[1], c = out[0], d = out[1];
  auto cut = [&](int i, int j) {
    const double t = hv[i] / (hv[i] - hv[j]);
    return V3(p[i] + t * (p[j] - p[i]));
  };
  const V3 a1 = p[a], a2 = cut(a, c), a3 = cut(a, d);
  const V3 b1 = p[b], b2 = cut(b, c), b3 = cut(b, d);
  return tet_volume(a1, a2, a3, b3) + tet_volume(a1, a2, b2, b3) + tet_volume(a1, b1, b2, b3);
}

double polyhedron_cap_volume(const Polytope& p, const Vec& u, double level) {
  const V3 uu = u.head<3>();
  const V3 c = p.centroid().head<3>();
  const double hc = uu.dot(c) - level;
  const auto& verts = p.vertices();
  const auto& cum = p.fan_cumulative();
  double total = 0.0;
  double prev = 0.0;
  for (std::size_t k = 0; k < p.fan().size(); ++k) {
    const auto& s = p.fan()[k];
    const double vol = cum[k] - prev;
    prev = cum[k];
    std::array<V3, 4> pts{c, verts[s[0]].head<3>(), verts[s[1]].head<3>(),
                          verts[s[2]].head<3>()};
    std::array<double, 4> hv{hc, uu.dot(pts[1]) - level, uu.dot(pts[2]) - level,
                             uu.dot(pts[3]) - level};
    total += clipped_tet(pts, hv, vol);
  }
  return total;
}

}  // namespace

double cap_volume_at(const Polytope& p, const Vec& u, double level) {
  switch (p.dim()) {
    case 2:
      return polygon_cap_area(p, u, level);
    case 3:
      return polyhedron_cap_volume(p, u, level);
    default: {
      const Halfspace cap{-u, -level};
      return clipped_volume(p, std::span<const Halfspace>(&cap, 1));
    }
  }
}

double clipped_volume(const Polytope& p, std::span<const Halfspace> extra) {
  std::vector<Halfspace> hs(p.facets().begin(), p.facets().end());
  hs.insert(hs.end(), extra.begin(), extra.end());
  return halfspace_volume(hs, p.dim(), p.centroid());
}

}  // namespace polylab
