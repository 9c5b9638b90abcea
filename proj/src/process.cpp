#include "polylab/process.hpp"

#include "polylab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace polylab {

namespace {

double ball_volume(int d, double r) {
  return std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d + 1.0) * std::pow(r, d);
}

// Half the inscribed ball at x: a lower bound for v(x).
double ball_lower(const Polytope& p, const Vec& x) {
  const double r = boundary_slack(p, x);
  return r <= 0.0 ? 0.0 : 0.5 * ball_volume(p.dim(), r);
}

}  // namespace

double asymptotic_alpha(int d) { return std::pow(6.0 * d, d) * (4.0 * d * d + d - 1.0); }

double asymptotic_beta(int d) { return 4.0 * d * d + d - 1.0; }

double lln(double x) { return std::log(std::log(x)); }

ExperimentScales make_scales(int d, double eta, const ConstantsConfig& constants) {
  if (!(eta > std::exp(std::numbers::e)))
    throw Error(ErrorKind::InvalidIntensity, "eta must exceed e^e so that lln eta > 1");
  ExperimentScales sc;
  sc.dim = d;
  sc.eta = eta;
  sc.asymptotic_constants = constants.asymptotic;
  sc.alpha = constants.asymptotic ? asymptotic_alpha(d) : constants.alpha_desk;
  sc.beta = constants.asymptotic ? asymptotic_beta(d) : constants.beta_desk;
  sc.scale_factor = sc.alpha / asymptotic_alpha(d);
  sc.T = sc.alpha * lln(eta) / eta;
  sc.T_star = t_star_for(d, sc.T);
  sc.s = 1.0 / (eta * std::pow(std::log(eta), sc.beta));
  sc.U = std::log(eta) / eta;
  sc.U_star = t_star_for(d, sc.U);
  sc.gamma = gamma_for(d);
  if (!(sc.T > sc.s))
    throw Error(ErrorKind::InvalidIntensity, "scales need T > s; raise eta");
  return sc;
}

PoissonSample sample_poisson(const Polytope& p, double eta, Rng& rng) {
  const double mean = eta * p.volume();
  if (!(mean > 0.0) || !std::isfinite(mean))
    throw Error(ErrorKind::InvalidIntensity, "eta V(P) must be positive and finite");
  PoissonSample out;
  out.eta = eta;
  const std::uint64_t n = rng.poisson(mean);
  out.points.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) out.points.push_back(sample_uniform(p, rng));
  return out;
}

double poisson_tail_bound(double p) { return 3.0 / (3.0 - std::numbers::e) * std::exp(-p); }

double poisson_upper_tail(double p, long k) {
  if (k <= 0) return 1.0;
  // Sum the lower part in log space and subtract; switch to the upper sum
  // when the lower part dominates.
  double lower = 0.0;
  double term = std::exp(-p);
  for (long i = 0; i < k; ++i) {
    lower += term;
    term *= p / static_cast<double>(i + 1);
  }
  if (lower < 0.5) return 1.0 - lower;
  double upper = 0.0;
  term = std::exp(-p + k * std::log(p) - std::lgamma(static_cast<double>(k) + 1.0));
  for (long i = k; term > 1e-300 * (upper + 1e-300) && i < k + 100000; ++i) {
    upper += term;
    term *= p / static_cast<double>(i + 1);
  }
  return upper;
}

double fit_b2(const Polytope& p, std::uint64_t seed, long budget, int jobs) {
  const int d = p.dim();
  const double F = static_cast<double>(flag_count(p));
  const double levels[] = {1e-2, 1e-3, 1e-4};
  double window = 0.0;
  for (int k = 0; k < 3; ++k) {
    const double s = levels[k] * p.volume();
    std::vector<std::uint8_t> hit(static_cast<std::size_t>(budget), 0);
    parallel_for(hit.size(), jobs, [&](std::size_t i) {
      Rng rng = Rng::derive(seed, 31 + k, i);
      hit[i] = in_wet_part(p, sample_uniform(p, rng), s);
    });
    long n = 0;
    for (auto h : hit) n += h;
    const double wet = p.volume() * static_cast<double>(n) / static_cast<double>(budget);
    window = std::max(window, wet / (F * s * std::pow(std::log(1.0 / s), d - 1)));
  }
  return d * std::pow(6.0, d) * window;
}

ExperimentGeometry build_geometry(const Polytope& p, const ExperimentScales& scales,
                                  std::uint64_t seed, const GeometryOptions& options, double b2) {
  const int d = p.dim();
  ExperimentGeometry g;
  g.polytope = &p;
  g.scales = scales;
  g.F = flag_count(p);
  g.b2 = b2 > 0.0 ? b2 : fit_b2(p, seed ^ 0xB2, options.b2_budget, options.cells.jobs);
  g.covering = cap_covering(p, saturate(p, scales.T, seed, options.saturate));
  g.cells = build_cells(p, g.covering, scales.T, seed + 1, options.cells);
  g.event_b_body =
      std::make_shared<const LevelSet>(p, scales.U_star, options.cells.level_rays, options.cells.jobs);
  g.trimmed_volume.resize(g.m());
  for (int j = 0; j < g.m(); ++j) {
    g.trimmed_volume[j] = p.volume() * static_cast<double>(g.cells.pool[j].size()) /
                          static_cast<double>(g.cells.pool_draws);
    g.M_vol = std::max(g.M_vol, g.trimmed_volume[j]);
  }
  g.count_bound = 3.0 * std::pow(6.0 * scales.gamma, d) * scales.alpha * lln(scales.eta);
  g.wet_u_bound = 3.0 * g.b2 * static_cast<double>(g.F) * std::pow(std::log(scales.eta), d);
  return g;
}

EventA event_A(const PoissonSample& sample, const ExperimentGeometry& g) {
  const Polytope& p = *g.polytope;
  const ExperimentScales& sc = g.scales;
  const int m = g.m();
  std::vector<std::uint8_t> hit(m, 0);
  std::vector<long> counts(m, 0);
  EventA a;
  for (const auto& x : sample.points) {
    const double lb = ball_lower(p, x);
    if (lb > sc.T_star) continue;
    if (lb <= sc.s && in_wet_part(p, x, sc.s)) ++a.wet_points;
    if (lb <= sc.T) {
      for (int j = 0; j < m; ++j) {
        if (!hit[j] && g.covering.elements[j].cap.contains(x) && g.covering.inner_contains(j, x))
          hit[j] = 1;
      }
    }
    if (g.cells.trimmed(x)) {
      ++counts[g.cells.cell_of(x)];
      ++a.trimmed_total;
    }
  }
  for (int j = 0; j < m; ++j) a.empty_inner_sets += !hit[j];
  a.max_trimmed_count = m ? *std::max_element(counts.begin(), counts.end()) : 0;
  a.count_slack = static_cast<double>(a.max_trimmed_count) / g.count_bound;
  a.holds = a.empty_inner_sets == 0 && a.wet_points == 0 &&
            static_cast<double>(a.max_trimmed_count) <= g.count_bound;
  return a;
}

namespace {

bool level_points_inside(const LevelSet& body, const HullComplex& hull) {
  if (body.empty()) return true;
  if (hull.degenerate) return false;
  for (const auto& lp : body.level_points())
    if (!hull_contains(hull, lp.z)) return false;
  return true;
}

}  // namespace

bool event_B(const PoissonSample& sample, const HullComplex& hull, const ExperimentGeometry& g) {
  if (sample.points.empty()) return false;
  const Polytope& p = *g.polytope;
  long wet = 0;
  for (const auto& x : sample.points)
    if (ball_lower(p, x) <= g.scales.U_star && g.event_b_body->wet(x)) ++wet;
  return level_points_inside(*g.event_b_body, hull) && static_cast<double>(wet) <= g.wet_u_bound;
}

Realization realize(PoissonSample sample, const ExperimentGeometry& g) {
  const int d = g.polytope->dim();
  Realization r;
  r.sample = std::move(sample);
  r.f.assign(d, 0);
  if (r.sample.N() > d) r.hull = convex_hull(r.sample.points);
  else r.hull.degenerate = true;
  if (!r.hull.degenerate) {
    r.volume = r.hull.volume;
    r.f = r.hull.f;
  }
  r.a_detail = event_A(r.sample, g);
  r.event_A = r.a_detail.holds;
  r.sandwich_outer = r.a_detail.wet_points == 0;
  r.sandwich_inner = level_points_inside(*g.cells.upper, r.hull);
  r.event_B = event_B(r.sample, r.hull, g);
  return r;
}

double ZetaVector::max() const {
  return values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
}

ZetaVector zeta_volume(const Realization& r, const ExperimentGeometry& g) {
  const Polytope& p = *g.polytope;
  const int m = g.m();
  ZetaVector z;
  z.values.assign(m, 0.0);
  const double missed = std::max(0.0, p.volume() - r.volume);
  double raw_total = 0.0;
  for (int j = 0; j < m; ++j) {
    long out = 0;
    for (const auto& x : g.cells.pool[j]) out += r.hull.degenerate || !hull_contains(r.hull, x);
    z.values[j] = p.volume() * static_cast<double>(out) / static_cast<double>(g.cells.pool_draws);
    raw_total += z.values[j];
  }
  // Proportional correction to the exact missed volume. When P(v >= T*) is
  // not inside the hull, missed volume outside the trimmed cells goes to the
  // overflow coordinate.
  if (raw_total > 0.0 && (r.sandwich_inner || raw_total > missed)) {
    const double scale = missed / raw_total;
    for (auto& v : z.values) v *= scale;
    raw_total = missed;
  }
  z.overflow = missed - raw_total;
  z.total = missed;
  double sum = z.overflow;
  for (double v : z.values) sum += v;
  z.exact = std::fabs(sum - missed) <= kTauVol * std::max(1, m);
  return z;
}

ZetaVector zeta_faces(const Realization& r, const ExperimentGeometry& g, int l) {
  const int d = g.polytope->dim();
  if (l < 0 || l >= d) throw Error(ErrorKind::PreconditionViolated, "face dimension out of range");
  ZetaVector z;
  z.values.assign(g.m(), 0.0);
  if (r.hull.degenerate || r.hull.faces.empty()) return z;
  std::vector<int> cell(r.sample.points.size(), -1);
  for (int v : r.hull.hull_vertices) cell[v] = g.cells.cell_of(r.sample.points[v]);
  const double w = 1.0 / (l + 1);
  for (const auto& face : r.hull.faces[l]) {
    if (static_cast<int>(face.size()) != l + 1) z.simplicial = false;
    for (int v : face) z.values[cell[v]] += w;
  }
  double sum = 0.0;
  for (double v : z.values) sum += v;
  z.total = static_cast<double>(r.hull.f[l]);
  z.exact = z.simplicial && std::fabs(sum - z.total) <= 1e-9 * std::max(1.0, z.total);
  return z;
}

}  // namespace polylab
