#include "polylab/caps.hpp"

#include "polylab/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

namespace polylab {

namespace {

double extent(const Polytope& p) {
  double s = 1.0;
  for (const auto& v : p.vertices()) s = std::max(s, v.cwiseAbs().maxCoeff());
  return s;
}

double ball_volume(int d, double r) {
  return std::pow(std::numbers::pi, d / 2.0) / std::tgamma(d / 2.0 + 1.0) * std::pow(r, d);
}

Vec lex_smallest_top_vertex(const Polytope& p, const Vec& u, double h) {
  const Vec* best = nullptr;
  const double tol = kTauGeom * extent(p);
  for (const auto& v : p.vertices()) {
    if (u.dot(v) < h - tol) continue;
    if (!best || std::lexicographical_compare(v.data(), v.data() + v.size(), best->data(),
                                              best->data() + best->size()))
      best = &v;
  }
  return *best;
}

// Sutherland-Hodgman clip of a convex polygon to {x : a . x <= b}.
using P2 = Eigen::Vector2d;

void clip_polygon(std::vector<P2>& poly, std::vector<P2>& scratch, const P2& a, double b) {
  scratch.clear();
  const std::size_t n = poly.size();
  if (n == 0) return;
  P2 prev = poly[n - 1];
  double gp = b - a.dot(prev);
  for (std::size_t i = 0; i < n; ++i) {
    const P2& cur = poly[i];
    const double gc = b - a.dot(cur);
    if ((gp >= 0) != (gc >= 0)) scratch.push_back(prev + (gp / (gp - gc)) * (cur - prev));
    if (gc >= 0) scratch.push_back(cur);
    prev = cur;
    gp = gc;
  }
  poly.swap(scratch);
}

double polygon_area(const std::vector<P2>& poly) {
  double twice = 0.0;
  for (std::size_t i = 0, n = poly.size(); i < n; ++i) {
    const P2& a = poly[i];
    const P2& b = poly[(i + 1) % n];
    twice += a.x() * b.y() - a.y() * b.x();
  }
  return 0.5 * std::fabs(twice);
}

void check_interior(const Polytope& p, const Vec& z) {
  const double slack = boundary_slack(p, z);
  const double tol = kTauGeom * extent(p);
  if (slack < -tol) throw Error(ErrorKind::PreconditionViolated, "point lies outside P");
  if (slack <= tol) throw Error(ErrorKind::BoundaryPoint, "point lies on the boundary of P");
}

// Orthonormal basis of the tangent space at unit u.
Mat tangent_basis(const Vec& u) {
  const int d = static_cast<int>(u.size());
  Mat basis(d - 1, d);
  int rank = 0;
  for (int j = 0; j < d && rank < d - 1; ++j) {
    Vec e = Vec::Zero(d);
    e[j] = 1.0;
    e -= u.dot(e) * u;
    for (int k = 0; k < rank; ++k) e -= basis.row(k).dot(e) * basis.row(k).transpose();
    const double n = e.norm();
    if (n < 1e-6) continue;
    basis.row(rank++) = (e / n).transpose();
  }
  return basis;
}

// Nelder-Mead over a tangent chart at u0. Returns best value and direction.
std::pair<double, Vec> refine(const Polytope& p, const Vec& z, const Vec& u0, double step,
                              double tol) {
  const int d = p.dim();
  const int n = d - 1;
  const Mat basis = tangent_basis(u0);
  auto dir_of = [&](const Eigen::VectorXd& a) {
    Vec u = u0;
    for (int k = 0; k < n; ++k) u += a[k] * basis.row(k).transpose();
    return Vec(u / u.norm());
  };
  auto f = [&](const Eigen::VectorXd& a) {
    const Vec u = dir_of(a);
    return cap_volume_at(p, u, u.dot(z));
  };
  std::vector<Eigen::VectorXd> x(n + 1, Eigen::VectorXd::Zero(n));
  std::vector<double> fx(n + 1);
  for (int k = 0; k < n; ++k) x[k + 1][k] = step;
  for (int i = 0; i <= n; ++i) fx[i] = f(x[i]);
  std::vector<int> order(n + 1);
  for (int iter = 0; iter < 600; ++iter) {
    for (int i = 0; i <= n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) { return fx[a] < fx[b]; });
    const int best = order[0], worst = order[n], second = order[n > 0 ? n - 1 : 0];
    double size = 0.0;
    for (int i = 0; i <= n; ++i) size = std::max(size, (x[i] - x[best]).cwiseAbs().maxCoeff());
    if (fx[worst] - fx[best] <= tol * 1e-4 * fx[best] && size < 1e-9) break;
    if (size < 1e-13) break;
    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (int i = 0; i <= n; ++i)
      if (i != worst) centroid += x[i];
    centroid /= n;
    const Eigen::VectorXd xr = centroid + (centroid - x[worst]);
    const double fr = f(xr);
    if (fr < fx[best]) {
      const Eigen::VectorXd xe = centroid + 2.0 * (centroid - x[worst]);
      const double fe = f(xe);
      if (fe < fr) {
        x[worst] = xe;
        fx[worst] = fe;
      } else {
        x[worst] = xr;
        fx[worst] = fr;
      }
    } else if (fr < fx[second]) {
      x[worst] = xr;
      fx[worst] = fr;
    } else {
      const bool outside = fr < fx[worst];
      const Eigen::VectorXd xc = outside ? Eigen::VectorXd(centroid + 0.5 * (xr - centroid))
                                         : Eigen::VectorXd(centroid + 0.5 * (x[worst] - centroid));
      const double fc = f(xc);
      if (fc < std::min(fr, fx[worst])) {
        x[worst] = xc;
        fx[worst] = fc;
      } else {
        for (int i = 0; i <= n; ++i) {
          if (i == best) continue;
          x[i] = x[best] + 0.5 * (x[i] - x[best]);
          fx[i] = f(x[i]);
        }
      }
    }
  }
  int best = 0;
  for (int i = 1; i <= n; ++i)
    if (fx[i] < fx[best]) best = i;
  return {fx[best], dir_of(x[best])};
}

int default_grid(int d) {
  if (d == 2) return 512;
  if (d == 3) return 2048;
  return 4096;
}

double grid_spacing(int d, int count) {
  if (d == 2) return 2.0 * std::numbers::pi / count;
  // Surface area of S^{d-1} shared between count points.
  const double area = 2.0 * std::pow(std::numbers::pi, d / 2.0) / std::tgamma(d / 2.0);
  return std::pow(area / count, 1.0 / (d - 1));
}

}  // namespace

const PointList& direction_grid(int dim, int count) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, PointList> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find({dim, count});
  if (it != cache.end()) return it->second;
  PointList grid;
  grid.reserve(count);
  if (dim == 2) {
    for (int i = 0; i < count; ++i) {
      const double a = 2.0 * std::numbers::pi * (i + 0.5) / count;
      grid.push_back(make_vec({std::cos(a), std::sin(a)}));
    }
  } else if (dim == 3) {
    // Fibonacci sphere.
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < count; ++i) {
      const double zc = 1.0 - (2.0 * i + 1.0) / count;
      const double r = std::sqrt(std::max(0.0, 1.0 - zc * zc));
      const double phi = golden * i;
      grid.push_back(make_vec({r * std::cos(phi), r * std::sin(phi), zc}));
    }
  } else {
    Rng rng(0x5EED0000ull + static_cast<unsigned>(dim));
    for (int i = 0; i < count; ++i) grid.push_back(rng.direction(dim));
  }
  return cache.emplace(std::make_pair(dim, count), std::move(grid)).first->second;
}

Cap make_cap(const Polytope& p, const Vec& u, double t) {
  if (!(t > 0.0)) throw Error(ErrorKind::InvalidDepth, "cap depth must be positive");
  Cap cap;
  cap.u = u;
  const double h = support(p, u);
  cap.t = t;
  cap.level = h - t;
  cap.volume = t >= p.width(u) ? p.volume() : cap_volume_at(p, u, cap.level);
  cap.center = lex_smallest_top_vertex(p, u, h);
  return cap;
}

Cap dilate(const Polytope& p, const Cap& cap, double lambda) {
  return make_cap(p, cap.u, lambda * cap.t);
}

Polytope cap_slice(const Polytope& p, const Cap& cap) {
  std::vector<Halfspace> hs(p.facets().begin(), p.facets().end());
  hs.push_back(cap.halfspace());
  return from_halfspaces(hs, p.dim());
}

MinimalCapResult minimal_cap(const Polytope& p, const Vec& z, const CapSearch& search) {
  check_interior(p, z);
  const int d = p.dim();
  const int count = search.grid > 0 ? search.grid : default_grid(d);
  const PointList& grid = direction_grid(d, count);
  std::vector<double> vals(count);
  for (int i = 0; i < count; ++i) vals[i] = cap_volume_at(p, grid[i], grid[i].dot(z));
  std::vector<int> order(count);
  for (int i = 0; i < count; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return vals[a] < vals[b]; });

  const double spacing = grid_spacing(d, count);
  const double min_cos = std::cos(std::min(std::numbers::pi, 2.5 * spacing));
  std::vector<int> seeds;
  for (int i : order) {
    if (static_cast<int>(seeds.size()) >= search.seeds) break;
    bool separated = true;
    for (int s : seeds) separated = separated && grid[i].dot(grid[s]) < min_cos;
    if (separated) seeds.push_back(i);
  }
  double best_v = vals[order[0]];
  Vec best_u = grid[order[0]];
  for (int s : seeds) {
    auto [v, u] = refine(p, z, grid[s], 0.5 * spacing, search.tol);
    if (v < best_v) {
      best_v = v;
      best_u = u;
    }
  }
  MinimalCapResult out;
  out.v = best_v;
  out.direction_grid_size = count;
  out.cap.u = best_u;
  const double h = support(p, best_u);
  out.cap.level = best_u.dot(z);
  out.cap.t = h - out.cap.level;
  out.cap.volume = best_v;
  out.cap.center = lex_smallest_top_vertex(p, best_u, h);
  return out;
}

double v_at(const Polytope& p, const Vec& z, const CapSearch& search) {
  return minimal_cap(p, z, search).v;
}

double v_or_zero(const Polytope& p, const Vec& z) {
  const double slack = boundary_slack(p, z);
  if (slack <= kTauGeom * extent(p)) return 0.0;
  return minimal_cap(p, z).v;
}

VBounds v_bounds(const Polytope& p, const Vec& z, bool with_macbeath) {
  VBounds b;
  const double r = boundary_slack(p, z);
  if (r <= 0.0) return b;
  b.lower = 0.5 * ball_volume(p.dim(), r);
  b.upper = p.volume();
  for (const auto& f : p.facets()) b.upper = std::min(b.upper, cap_volume_at(p, f.normal, f.normal.dot(z)));
  if (with_macbeath && b.lower < b.upper) b.lower = std::max(b.lower, 0.5 * macbeath_volume(p, z));
  b.lower = std::min(b.lower, b.upper);
  return b;
}

bool MacbeathRegion::contains(const Vec& x, double tol) const {
  for (const auto& h : halfspaces)
    if (h.normal.dot(x) > h.offset + tol) return false;
  return true;
}

std::vector<Halfspace> macbeath_halfspaces(const Polytope& p, const Vec& z, double lambda) {
  std::vector<Halfspace> hs;
  hs.reserve(2 * p.facets().size());
  for (const auto& f : p.facets()) {
    const double az = f.normal.dot(z);
    const double delta = f.offset - az;
    hs.push_back({f.normal, az + lambda * delta});
    hs.push_back({Vec(-f.normal), -az + lambda * delta});
  }
  return hs;
}

MacbeathRegion macbeath(const Polytope& p, const Vec& z, double lambda) {
  check_interior(p, z);
  MacbeathRegion m;
  m.z = z;
  m.lambda = lambda;
  m.halfspaces = macbeath_halfspaces(p, z, lambda);
  m.volume = halfspace_volume(m.halfspaces, p.dim(), z);
  return m;
}

double macbeath_volume(const Polytope& p, const Vec& z) {
  if (p.dim() == 2) {
    thread_local std::vector<P2> poly, scratch;
    poly.clear();
    for (int i : p.ring()) poly.emplace_back(p.vertices()[i][0], p.vertices()[i][1]);
    for (const auto& f : p.facets()) {
      // Reflected facet: a . (2z - x) <= b.
      const P2 a(f.normal[0], f.normal[1]);
      clip_polygon(poly, scratch, -a, f.offset - 2.0 * a.dot(P2(z[0], z[1])));
    }
    return polygon_area(poly);
  }
  const auto hs = macbeath_halfspaces(p, z, 1.0);
  return halfspace_volume(hs, p.dim(), z);
}

double macbeath_gauge(const Polytope& p, const Vec& z, const Vec& x) {
  double mu = 0.0;
  for (const auto& f : p.facets()) {
    const double delta = f.offset - f.normal.dot(z);
    mu = std::max(mu, std::fabs(f.normal.dot(x - z)) / delta);
  }
  return mu;
}

bool floating_body_contains(const Polytope& p, const Vec& z, double t) {
  if (!(t > 0.0)) throw Error(ErrorKind::InvalidDepth, "level must be positive");
  if (!contains(p, z)) return false;
  return v_or_zero(p, z) >= t;
}

bool in_wet_part(const Polytope& p, const Vec& x, double s) {
  const VBounds quick = v_bounds(p, x, false);
  if (quick.lower > s) return false;
  if (quick.upper <= s) return true;
  if (0.5 * macbeath_volume(p, x) > s) return false;
  return v_or_zero(p, x) <= s;
}

Estimate wet_part_volume(const Polytope& p, double s, long budget, Rng& rng) {
  if (!(s > 0.0)) throw Error(ErrorKind::InvalidDepth, "level must be positive");
  long hits = 0;
  for (long i = 0; i < budget; ++i) hits += in_wet_part(p, sample_uniform(p, rng), s);
  const double frac = static_cast<double>(hits) / static_cast<double>(budget);
  return {p.volume() * frac,
          p.volume() * std::sqrt(frac * (1.0 - frac) / static_cast<double>(budget))};
}

LevelPoint boundary_point_at_level(const Polytope& p, const Vec& direction, double s) {
  const Vec dir = direction / direction.norm();
  const Vec& c = p.centroid();
  double reach = std::numeric_limits<double>::infinity();
  for (const auto& f : p.facets()) {
    const double ad = f.normal.dot(dir);
    if (ad > 1e-15) reach = std::min(reach, f.slack(c) / ad);
  }
  auto eval = [&](double r) -> std::pair<double, MinimalCapResult> {
    const Vec x = c + r * dir;
    if (boundary_slack(p, x) <= kTauGeom * extent(p)) return {0.0, {}};
    MinimalCapResult m = minimal_cap(p, x);
    return {m.v, m};
  };
  auto finish = [&](double r, const MinimalCapResult& m) {
    return LevelPoint{Vec(c + r * dir), m.v, m.cap};
  };

  auto [v0, m0] = eval(0.0);
  if (std::fabs(v0 - s) <= kTauLevel * s) return finish(0.0, m0);
  double lo = 0.0, glo = v0 - s;
  if (glo < 0) {
    bool found = false;
    for (int k = 1; k < 64 && !found; ++k) {
      const double r = reach * k / 64.0;
      const auto [vk, mk] = eval(r);
      if (std::fabs(vk - s) <= kTauLevel * s) return finish(r, mk);
      if (vk > s) {
        lo = r;
        glo = vk - s;
        found = true;
      }
    }
    if (!found) throw Error(ErrorKind::LevelNotBracketed, "no point on the ray reaches the level");
  }
  // The floating body is convex, so the ray crosses its boundary once.
  double hi = reach, ghi = -s;
  int side = 0;
  double best_gap = std::numeric_limits<double>::infinity();
  double best_r = lo;
  MinimalCapResult best_m = m0;
  for (int iter = 0; iter < 200; ++iter) {
    double r = (lo * ghi - hi * glo) / (ghi - glo);
    if (!(r > lo && r < hi)) r = 0.5 * (lo + hi);
    auto [v, m] = eval(r);
    const double g = v - s;
    if (std::fabs(g) < best_gap && v > 0.0) {
      best_gap = std::fabs(g);
      best_r = r;
      best_m = m;
    }
    if (std::fabs(g) <= kTauLevel * s) return finish(r, m);
    if (g > 0) {
      lo = r;
      glo = g;
      if (side == 1) ghi *= 0.5;
      side = 1;
    } else {
      hi = r;
      ghi = g;
      if (side == -1) glo *= 0.5;
      side = -1;
    }
    if (hi - lo <= 1e-15 * reach) break;
  }
  return finish(best_r, best_m);
}

namespace {

double segment_max(const Polytope& p, const Vec& a, const Vec& b, double stop_at) {
  constexpr int kSamples = 64;
  std::array<double, kSamples> vals;
  int arg = 0;
  for (int k = 0; k < kSamples; ++k) {
    const double t = static_cast<double>(k) / (kSamples - 1);
    vals[k] = v_or_zero(p, a + t * (b - a));
    if (vals[k] >= stop_at) return vals[k];
    if (vals[k] > vals[arg]) arg = k;
  }
  double lo = static_cast<double>(std::max(0, arg - 1)) / (kSamples - 1);
  double hi = static_cast<double>(std::min(kSamples - 1, arg + 1)) / (kSamples - 1);
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - inv_phi * (hi - lo), x2 = lo + inv_phi * (hi - lo);
  double f1 = v_or_zero(p, a + x1 * (b - a)), f2 = v_or_zero(p, a + x2 * (b - a));
  double best = std::max({vals[arg], f1, f2});
  while (hi - lo > 1e-7 && best < stop_at) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = v_or_zero(p, a + x2 * (b - a));
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = v_or_zero(p, a + x1 * (b - a));
    }
    best = std::max({best, f1, f2});
  }
  return best;
}

}  // namespace

double max_v_on_segment(const Polytope& p, const Vec& a, const Vec& b) {
  return segment_max(p, a, b, std::numeric_limits<double>::infinity());
}

bool segment_reaches_level(const Polytope& p, const Vec& a, const Vec& b, double T) {
  return segment_max(p, a, b, T) >= T;
}

bool visible_set_contains(const Polytope& p, const Vec& z, double T, const Vec& x) {
  if (!contains(p, x)) return false;
  return segment_max(p, x, z, T) < T;
}

double superset_beta(int dim) { return 2.0 * std::numbers::e * dim * dim * dim + 1.0; }

Cap visibility_superset(const Polytope& p, const Vec& z, double T) {
  const MinimalCapResult m = minimal_cap(p, z);
  const double half = 0.5 * p.volume();
  if (m.v > half * (1.0 + kTauLevel)) {
    throw Error(ErrorKind::PreconditionViolated, "v(z) must stay below V(P)/2");
  }
  if (m.v > T * (1.0 + kTauLevel)) throw Error(ErrorKind::PreconditionViolated, "v(z) exceeds T");
  return dilate(p, m.cap, superset_beta(p.dim()) * T / m.v);
}

}  // namespace polylab
