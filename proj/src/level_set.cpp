#include "polylab/level_set.hpp"

#include "polylab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace polylab {

namespace {

int default_rays(int d) {
  if (d == 2) return 512;
  if (d == 3) return 1024;
  return 2048;
}

int default_depth(int d) {
  if (d == 2) return 10;
  if (d == 3) return 7;
  return 4;
}

double box_max(const Vec& a, const Vec& lo, const Vec& hi) {
  double m = 0.0;
  for (int j = 0; j < a.size(); ++j) m += a[j] > 0 ? a[j] * hi[j] : a[j] * lo[j];
  return m;
}

double box_min(const Vec& a, const Vec& lo, const Vec& hi) {
  double m = 0.0;
  for (int j = 0; j < a.size(); ++j) m += a[j] > 0 ? a[j] * lo[j] : a[j] * hi[j];
  return m;
}

// Parameter range of {a + t (b - a) : t in [t0, t1]} inside all half-spaces.
bool clip_segment(const std::vector<Halfspace>& hs, const Vec& a, const Vec& b, double& t0,
                  double& t1, double tol) {
  const Vec d = b - a;
  for (const auto& h : hs) {
    const double num = h.offset - h.normal.dot(a) + tol;
    const double den = h.normal.dot(d);
    if (std::fabs(den) < 1e-300) {
      if (num < 0) return false;
      continue;
    }
    const double t = num / den;
    if (den > 0) t1 = std::min(t1, t);
    else t0 = std::max(t0, t);
    if (t0 > t1) return false;
  }
  return true;
}

}  // namespace

LevelSet::LevelSet(const Polytope& p, double s, int rays, int jobs) : p_(&p), s_(s) {
  const int d = p.dim();
  const double target = s * (1.0 + 2.0 * kTauLevel);
  if (v_or_zero(p, p.centroid()) < target) {
    empty_ = true;
    return;
  }
  const int n = rays > 0 ? rays : default_rays(d);
  PointList dirs;
  if (d == 2) {
    for (int i = 0; i < n; ++i) {
      const double a = 2.0 * std::numbers::pi * (i + 0.25) / n;
      dirs.push_back(make_vec({std::cos(a), std::sin(a)}));
    }
  } else {
    dirs = direction_grid(d, n);
  }
  points_.resize(n);
  outer_.resize(n);
  parallel_for(static_cast<std::size_t>(n), jobs, [&](std::size_t i) {
    points_[i] = boundary_point_at_level(p, dirs[i], target);
    // Deepen the minimal cap until its volume drops just below s.
    const Vec& u = points_[i].cap.u;
    const double want = s * (1.0 - 2.0 * kTauLevel);
    double lo = u.dot(points_[i].z), hi = support(p, u);
    for (int it = 0; it < 80 && hi - lo > 1e-15 * (1.0 + std::fabs(hi)); ++it) {
      const double mid = 0.5 * (lo + hi);
      if (cap_volume_at(p, u, mid) > want) lo = mid;
      else hi = mid;
    }
    outer_[i] = {u, hi};
  });

  PointList pts;
  for (const auto& lp : points_) pts.push_back(lp.z);
  HullOptions opts;
  opts.compute_faces = false;
  const HullComplex inner_hull = convex_hull(pts, opts);
  if (!inner_hull.degenerate) {
    for (const auto& f : inner_hull.facets) inner_.push_back({f.normal, f.offset});
  }
  build_grid();
}

void LevelSet::build_grid() {
  const int d = p_->dim();
  box_lo_ = p_->vertices()[0];
  box_hi_ = p_->vertices()[0];
  for (const auto& v : p_->vertices()) {
    box_lo_ = box_lo_.cwiseMin(v);
    box_hi_ = box_hi_.cwiseMax(v);
  }
  const Vec pad = 1e-9 * (box_hi_ - box_lo_) + Vec::Constant(d, 1e-12);
  box_lo_ -= pad;
  box_hi_ += pad;
  depth_ = default_depth(d);
  res_ = 1 << depth_;
  std::size_t cells = 1;
  for (int j = 0; j < d; ++j) cells *= static_cast<std::size_t>(res_);
  grid_.assign(cells, kMixed);
  std::vector<int> inner_ids(inner_.size()), outer_ids(outer_.size());
  for (std::size_t i = 0; i < inner_.size(); ++i) inner_ids[i] = static_cast<int>(i);
  for (std::size_t i = 0; i < outer_.size(); ++i) outer_ids[i] = static_cast<int>(i);
  classify(box_lo_, box_hi_, 0, inner_ids, outer_ids, std::vector<int>(d, 0), res_);
}

void LevelSet::classify(const Vec& lo, const Vec& hi, int depth,
                        const std::vector<int>& inner_ids, const std::vector<int>& outer_ids,
                        const std::vector<int>& cell_lo, int span) {
  const int d = p_->dim();
  auto fill = [&](std::uint8_t value) {
    std::vector<int> idx(d, 0);
    for (;;) {
      std::size_t flat = 0, stride = 1;
      for (int j = 0; j < d; ++j) {
        flat += static_cast<std::size_t>(cell_lo[j] + idx[j]) * stride;
        stride *= static_cast<std::size_t>(res_);
      }
      grid_[flat] = value;
      int j = 0;
      while (j < d && ++idx[j] == span) idx[j++] = 0;
      if (j == d) return;
    }
  };
  for (const auto& f : p_->facets()) {
    if (box_min(f.normal, lo, hi) > f.offset) {
      fill(kWet);  // outside P: never queried
      return;
    }
  }
  std::vector<int> outer_left;
  for (int k : outer_ids) {
    const auto& h = outer_[k];
    if (box_min(h.normal, lo, hi) >= h.offset) {
      fill(kWet);
      return;
    }
    if (box_max(h.normal, lo, hi) >= h.offset) outer_left.push_back(k);
  }
  std::vector<int> inner_left;
  for (int k : inner_ids) {
    const auto& h = inner_[k];
    if (box_max(h.normal, lo, hi) > h.offset) inner_left.push_back(k);
  }
  if (!inner_.empty() && inner_left.empty()) {
    fill(kDry);
    return;
  }
  if (depth == depth_) return;
  const int half = span / 2;
  const Vec mid = 0.5 * (lo + hi);
  for (int mask = 0; mask < (1 << d); ++mask) {
    Vec clo = lo, chi = hi;
    std::vector<int> child_lo = cell_lo;
    for (int j = 0; j < d; ++j) {
      if ((mask >> j) & 1) {
        clo[j] = mid[j];
        child_lo[j] += half;
      } else {
        chi[j] = mid[j];
      }
    }
    classify(clo, chi, depth + 1, inner_left, outer_left, child_lo, half);
  }
}

std::size_t LevelSet::cell_of(const Vec& x) const {
  std::size_t flat = 0, stride = 1;
  for (int j = 0; j < x.size(); ++j) {
    const double r = (x[j] - box_lo_[j]) / (box_hi_[j] - box_lo_[j]);
    const int i = std::clamp(static_cast<int>(r * res_), 0, res_ - 1);
    flat += static_cast<std::size_t>(i) * stride;
    stride *= static_cast<std::size_t>(res_);
  }
  return flat;
}

std::uint8_t LevelSet::quick(const Vec& x) const {
  const std::uint8_t g = grid_[cell_of(x)];
  if (g != kMixed) return g;
  for (const auto& h : outer_)
    if (h.normal.dot(x) >= h.offset) return kWet;
  if (!inner_.empty()) {
    bool inside = true;
    for (const auto& h : inner_) {
      if (h.normal.dot(x) > h.offset) {
        inside = false;
        break;
      }
    }
    if (inside) return kDry;
  }
  return kMixed;
}

bool LevelSet::wet(const Vec& x) const {
  if (empty_) return true;
  const std::uint8_t q = quick(x);
  if (q != kMixed) return q == kWet;
  return v_or_zero(*p_, x) <= s_;
}

bool LevelSet::segment_avoids(const Vec& a, const Vec& b) const {
  if (empty_) return true;
  if (!inner_.empty()) {
    double t0 = 0.0, t1 = 1.0;
    if (clip_segment(inner_, a, b, t0, t1, 0.0)) return false;
  }
  double t0 = 0.0, t1 = 1.0;
  if (!clip_segment(outer_, a, b, t0, t1, 0.0)) return true;
  const Vec a2 = a + t0 * (b - a);
  const Vec b2 = a + t1 * (b - a);
  // Walk the grid along the remaining piece.
  const Vec cell = (box_hi_ - box_lo_) / res_;
  const double len = (b2 - a2).cwiseAbs().cwiseQuotient(cell).maxCoeff();
  const int steps = std::max(2, static_cast<int>(std::ceil(4.0 * len)) + 1);
  bool all_wet = true;
  for (int k = 0; k <= steps; ++k) {
    const Vec x = a2 + (static_cast<double>(k) / steps) * (b2 - a2);
    const std::uint8_t g = grid_[cell_of(x)];
    if (g == kDry) return false;
    if (g != kWet) all_wet = false;
  }
  if (all_wet) return true;
  return !segment_reaches_level(*p_, a2, b2, s_);
}

double LevelSet::decided_fraction() const {
  if (grid_.empty()) return 1.0;
  std::size_t decided = 0;
  for (auto g : grid_) decided += g != kMixed;
  return static_cast<double>(decided) / static_cast<double>(grid_.size());
}

}  // namespace polylab
