#include "polylab/covering.hpp"

#include "polylab/kernel.hpp"
#include "polylab/parallel.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace polylab {

namespace {

// Stream tags for Rng::derive.
constexpr std::uint64_t kStreamWet = 11;
constexpr std::uint64_t kStreamInner = 12;
constexpr std::uint64_t kStreamSmallCap = 13;

// Wetness of x at two levels s <= t, sharing one exact evaluation.
std::pair<bool, bool> wet_at(const Polytope& p, const Vec& x, double s, double t) {
  const VBounds quick = v_bounds(p, x, false);
  if (quick.upper <= s) return {true, true};
  if (quick.lower > t) return {false, false};
  const double half_u = 0.5 * macbeath_volume(p, x);
  if (half_u > t) return {false, false};
  if (quick.upper <= t && half_u > s) return {false, true};
  const double v = v_or_zero(p, x);
  return {v <= s, v <= t};
}

double power(double base, int e) { return std::pow(base, static_cast<double>(e)); }

}  // namespace

double s0_for(int dim) { return power(2.0 * dim, -2 * dim); }

bool macbeath_disjoint(const Polytope& p, const Vec& z, const Vec& w, double lambda) {
  // Projection onto each facet normal is an interval around a . z.
  for (const auto& f : p.facets()) {
    const double az = f.normal.dot(z), aw = f.normal.dot(w);
    const double rz = lambda * (f.offset - az), rw = lambda * (f.offset - aw);
    if (std::fabs(az - aw) > rz + rw + kTauGeom) return true;
  }
  auto hs = macbeath_halfspaces(p, z, lambda);
  const auto hw = macbeath_halfspaces(p, w, lambda);
  hs.insert(hs.end(), hw.begin(), hw.end());
  return !halfspaces_feasible(hs, p.dim(), kTauGeom);
}

SaturatedSystem saturate(const Polytope& p, double s, std::uint64_t seed,
                         const SaturateOptions& options) {
  if (!(s > 0.0)) throw Error(ErrorKind::InvalidDepth, "level must be positive");
  if (options.patience < 1) throw Error(ErrorKind::PreconditionViolated, "patience must be >= 1");
  const int d = p.dim();
  SaturatedSystem sys;
  sys.dim = d;
  sys.s = s;
  sys.seed = seed;
  sys.patience = options.patience;
  sys.within_s0 = s <= s0_for(d) * p.volume() * (1.0 + kTauLevel);

  Rng rng(seed);
  int run = 0;
  long unbracketed = 0;
  while (run < options.patience && sys.candidates < options.max_candidates) {
    const Vec dir = rng.direction(d);
    ++sys.candidates;
    LevelPoint lp;
    try {
      lp = boundary_point_at_level(p, dir, s);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::LevelNotBracketed) throw;
      ++unbracketed;
      ++run;
      continue;
    }
    bool free = true;
    for (const auto& q : sys.points) {
      if (!macbeath_disjoint(p, lp.z, q.z, 0.5)) {
        free = false;
        break;
      }
    }
    if (free) {
      sys.points.push_back(std::move(lp));
      run = 0;
    } else {
      ++run;
    }
  }
  sys.final_rejection_run = run;
  if (sys.points.empty() && unbracketed == sys.candidates)
    throw Error(ErrorKind::LevelTooHigh, "level exceeds max v");
  return sys;
}

Cap CapCovering::dilated(const Polytope& p, int i, double lambda) const {
  return dilate(p, elements[i].cap, 6.0 * lambda);
}

bool CapCovering::inner_contains(int i, const Vec& x, double tol) const {
  for (const auto& h : elements[i].inner)
    if (h.normal.dot(x) > h.offset + tol) return false;
  return true;
}

CapCovering cap_covering(const Polytope& p, const SaturatedSystem& system) {
  CapCovering cov;
  cov.system = system;
  cov.elements.reserve(system.points.size());
  for (const auto& lp : system.points) {
    CoveringElement e;
    e.z = lp.z;
    e.cap = lp.cap;
    e.outer = dilate(p, lp.cap, 6.0);
    e.inner = macbeath_halfspaces(p, lp.z, 0.5);
    e.inner.push_back(lp.cap.halfspace());
    std::vector<Halfspace> all(p.facets().begin(), p.facets().end());
    all.insert(all.end(), e.inner.begin(), e.inner.end());
    e.inner_volume = halfspace_volume(all, p.dim(), lp.z);
    cov.elements.push_back(std::move(e));
  }
  return cov;
}

bool CoveringReport::all_pass() const {
  return m > 0 && outer_bounds.pass == outer_bounds.total &&
         inner_bounds.pass == inner_bounds.total && coverage_fraction == 1.0 &&
         inner_fraction == 1.0 && small_cap_fraction == 1.0 && lambda_cover_fraction == 1.0 &&
         m_within_bounds;
}

CoveringReport verify_covering(const Polytope& p, const CapCovering& covering, std::uint64_t seed,
                               const VerifyOptions& options) {
  const int d = p.dim();
  const double s = covering.system.s;
  const int m = covering.m();
  CoveringReport r;
  r.level = s;
  r.m = m;
  r.within_s0 = covering.system.within_s0;
  r.budget = options.budget;
  r.seed = seed;
  r.patience = covering.system.patience;
  r.candidates = covering.system.candidates;
  if (m == 0) return r;

  // Volume bounds on K_i and K'_i with relative slack for the level tolerance.
  const double slack = 1.0 + 10.0 * kTauLevel;
  const double outer_lo = s, outer_hi = power(6.0, d) * s;
  const double inner_lo = power(6.0 * d, -d) * s, inner_hi = power(2.0, -d) * s;
  r.outer_bounds = {0, m, std::numeric_limits<double>::infinity(), 0.0};
  r.inner_bounds = r.outer_bounds;
  for (const auto& e : covering.elements) {
    const double vo = e.outer.volume, vi = e.inner_volume;
    r.outer_bounds.pass += vo * slack >= outer_lo && vo <= outer_hi * slack;
    r.inner_bounds.pass += vi * slack >= inner_lo && vi <= inner_hi * slack;
    r.outer_bounds.worst_low = std::min(r.outer_bounds.worst_low, vo / outer_lo);
    r.outer_bounds.worst_high = std::max(r.outer_bounds.worst_high, vo / outer_hi);
    r.inner_bounds.worst_low = std::min(r.inner_bounds.worst_low, vi / inner_lo);
    r.inner_bounds.worst_high = std::max(r.inner_bounds.worst_high, vi / inner_hi);
  }

  // Coverage of the wet part at s and at lambda s, on uniform samples of P.
  std::vector<Cap> big(m);
  for (int i = 0; i < m; ++i) big[i] = covering.dilated(p, i, 3.0 * d * d * options.lambda);
  struct Verdict {
    bool wet = false, covered = false, wet_lambda = false, covered_lambda = false;
  };
  std::vector<Verdict> verdicts(static_cast<std::size_t>(options.budget));
  parallel_for(verdicts.size(), options.jobs, [&](std::size_t k) {
    Rng rng = Rng::derive(seed, kStreamWet, k);
    const Vec x = sample_uniform(p, rng);
    Verdict& out = verdicts[k];
    for (const auto& e : covering.elements) {
      if (e.outer.contains(x)) {
        out.covered = true;
        break;
      }
    }
    for (const auto& c : big) {
      if (c.contains(x)) {
        out.covered_lambda = true;
        break;
      }
    }
    const auto [w, wl] = wet_at(p, x, s, options.lambda * s);
    out.wet = w;
    out.wet_lambda = wl;
  });
  long wet = 0, wet_cov = 0, wl = 0, wl_cov = 0;
  for (const auto& v : verdicts) {
    wet += v.wet;
    wet_cov += v.wet && v.covered;
    wl += v.wet_lambda;
    wl_cov += v.wet_lambda && v.covered_lambda;
  }
  r.coverage_fraction = wet == 0 ? 1.0 : static_cast<double>(wet_cov) / static_cast<double>(wet);
  r.lambda_cover_fraction = wl == 0 ? 1.0 : static_cast<double>(wl_cov) / static_cast<double>(wl);
  const double frac = static_cast<double>(wet) / static_cast<double>(options.budget);
  r.wet_volume = p.volume() * frac;
  r.wet_volume_se = p.volume() * std::sqrt(frac * (1.0 - frac) / static_cast<double>(options.budget));

  // Inner sets lie in the wet part: sampled points of each K'_i.
  const int per = static_cast<int>(std::max<long>(4, options.budget / (10L * m)));
  std::vector<int> inner_ok(m, 0);
  parallel_for(static_cast<std::size_t>(m), options.jobs, [&](std::size_t i) {
    const auto& e = covering.elements[i];
    std::vector<Halfspace> hs(p.facets().begin(), p.facets().end());
    hs.insert(hs.end(), e.inner.begin(), e.inner.end());
    const Polytope k = from_halfspaces(hs, d);
    Rng rng = Rng::derive(seed, kStreamInner, i);
    int ok = 0;
    for (int j = 0; j < per; ++j) ok += in_wet_part(p, sample_uniform(k, rng), s * slack);
    inner_ok[i] = ok;
  });
  long inner_total = 0;
  for (int v : inner_ok) inner_total += v;
  r.inner_fraction = static_cast<double>(inner_total) / static_cast<double>(per * m);

  // Random caps of volume at most s sit inside some K_i^{3d}.
  std::vector<Cap> mid(m);
  for (int i = 0; i < m; ++i) mid[i] = covering.dilated(p, i, 3.0 * d);
  std::vector<std::uint8_t> cap_ok(static_cast<std::size_t>(options.small_caps), 0);
  parallel_for(cap_ok.size(), options.jobs, [&](std::size_t k) {
    Rng rng = Rng::derive(seed, kStreamSmallCap, k);
    const Vec u = rng.direction(d);
    const double want = s * rng.uniform_open();
    const double h = support(p, u);
    double lo = 0.0, hi = p.width(u);
    for (int it = 0; it < 100 && hi - lo > 1e-14 * (1.0 + hi); ++it) {
      const double t = 0.5 * (lo + hi);
      if (cap_volume_at(p, u, h - t) > want) hi = t;
      else lo = t;
    }
    if (!(lo > 0.0)) {
      cap_ok[k] = 1;
      return;
    }
    const Cap c = make_cap(p, u, lo);
    const PointList verts = cap_slice(p, c).vertices();
    for (const auto& e : mid) {
      bool inside = true;
      for (const auto& x : verts) inside = inside && e.contains(x);
      if (inside) {
        cap_ok[k] = 1;
        return;
      }
    }
  });
  long caps_ok = 0;
  for (auto v : cap_ok) caps_ok += v;
  r.small_cap_fraction =
      cap_ok.empty() ? 1.0 : static_cast<double>(caps_ok) / static_cast<double>(cap_ok.size());

  // Usual volume arguments: V(wet)/(6^d s) <= m <= V(wet)/((6d)^{-d} s).
  r.m_lower = r.wet_volume / (power(6.0, d) * s);
  r.m_upper = r.wet_volume / (power(6.0 * d, -d) * s);
  r.m_within_bounds = m >= r.m_lower && m <= r.m_upper;
  return r;
}

std::string covering_report_json(const CoveringReport& r) {
  using nlohmann::json;
  auto bound = [](const BoundCheck& b) {
    return json{{"pass", b.pass},
                {"total", b.total},
                {"min_ratio_to_lower", b.total ? b.worst_low : 0.0},
                {"max_ratio_to_upper", b.worst_high}};
  };
  json j{{"level", r.level},
         {"m", r.m},
         {"within_s0", r.within_s0},
         {"volume_bound_pass", {{"outer", bound(r.outer_bounds)}, {"inner", bound(r.inner_bounds)}}},
         {"coverage_fraction", r.coverage_fraction},
         {"inner_fraction", r.inner_fraction},
         {"small_cap_fraction", r.small_cap_fraction},
         {"lambda_cover_fraction", r.lambda_cover_fraction},
         {"wet_volume", r.wet_volume},
         {"wet_volume_se", r.wet_volume_se},
         {"m_bounds", {{"lower", r.m_lower}, {"upper", r.m_upper}, {"pass", r.m_within_bounds}}},
         {"budget", r.budget},
         {"seed", r.seed},
         {"patience", r.patience},
         {"candidates", r.candidates},
         {"all_pass", r.all_pass()}};
  if (r.m == 0) j["error"] = to_string(ErrorKind::LevelTooHigh);
  return j.dump(2);
}

int count_Z_in_cap(const SaturatedSystem& system, const Cap& cap) {
  int n = 0;
  for (const auto& lp : system.points) n += cap.contains(lp.z);
  return n;
}

bool convexhull_sandwich_witness(const PointList& picks, const LevelSet& floating_body) {
  if (floating_body.empty()) return true;
  if (picks.empty()) return false;
  const int d = static_cast<int>(picks[0].size());
  if (affine_rank(picks) < d) return false;
  HullOptions opts;
  opts.compute_faces = false;
  const HullComplex hull = convex_hull(picks, opts);
  for (const auto& lp : floating_body.level_points())
    if (!hull_contains(hull, lp.z)) return false;
  return true;
}

}  // namespace polylab
