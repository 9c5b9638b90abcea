#include "polylab/stats.hpp"

#include "polylab/parallel.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

namespace polylab {

namespace {

using nlohmann::json;

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double mean_of(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v;
  return x.empty() ? 0.0 : s / static_cast<double>(x.size());
}

double var_of(const std::vector<double>& x) {
  if (x.size() < 2) return 0.0;
  const double m = mean_of(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size() - 1);
}

// Sup distance between two empirical distribution functions.
double ecdf_distance(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double best = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    best = std::max(best, std::fabs(static_cast<double>(i) / a.size() -
                                    static_cast<double>(j) / b.size()));
  }
  return best;
}

double log_pow(double eta, int e) { return std::pow(std::log(eta), e); }

double factorial(int n) { return std::tgamma(n + 1.0); }

std::vector<double> zeta_V(const std::vector<ReplicationRecord>& records, double volume) {
  std::vector<double> z;
  for (const auto& r : records) z.push_back(volume - r.V);
  return z;
}

std::vector<double> face_values(const std::vector<ReplicationRecord>& records, int l) {
  std::vector<double> z;
  for (const auto& r : records) z.push_back(static_cast<double>(r.f[l]));
  return z;
}

template <class T>
T get_or(const json& j, const char* key, T fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, "field '" + where + key + "': " + e.what());
  }
}

json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::ParseError, std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorKind::ParseError, "config: top level must be an object");
  static const char* known[] = {"polytope", "etas", "replications", "seed", "constants",
                                "budgets", "ks_threshold", "jobs", "outputs"};
  for (const auto& [key, value] : j.items()) {
    if (std::find_if(std::begin(known), std::end(known), [&](const char* k) { return key == k; }) ==
        std::end(known))
      throw Error(ErrorKind::ParseError, "config: unknown field '" + key + "'");
  }
  ExperimentConfig c;
  c.polytope = get_or<std::string>(j, "polytope", c.polytope, "");
  if (!j.contains("etas")) throw Error(ErrorKind::ParseError, "config: missing field 'etas'");
  c.etas = get_or<std::vector<double>>(j, "etas", {}, "");
  c.replications = get_or<int>(j, "replications", c.replications, "");
  c.seed = get_or<std::uint64_t>(j, "seed", c.seed, "");
  c.ks_threshold = get_or<double>(j, "ks_threshold", c.ks_threshold, "");
  c.jobs = get_or<int>(j, "jobs", c.jobs, "");
  if (j.contains("constants")) {
    const json& k = j["constants"];
    c.constants.asymptotic = get_or<bool>(k, "asymptotic", false, "constants.");
    c.constants.alpha_desk = get_or<double>(k, "alpha_desk", c.constants.alpha_desk, "constants.");
    c.constants.beta_desk = get_or<double>(k, "beta_desk", c.constants.beta_desk, "constants.");
    c.constants.b2 = get_or<double>(k, "b2", c.constants.b2, "constants.");
  }
  if (j.contains("budgets")) {
    const json& b = j["budgets"];
    c.cell_validation_budget = get_or<long>(b, "cell_validation", c.cell_validation_budget, "budgets.");
    c.pool_per_cell = get_or<long>(b, "pool_per_cell", c.pool_per_cell, "budgets.");
    c.visibility_probes = get_or<int>(b, "visibility_probes", c.visibility_probes, "budgets.");
    c.b2_budget = get_or<long>(b, "b2", c.b2_budget, "budgets.");
    c.patience = get_or<int>(b, "patience", c.patience, "budgets.");
  }
  if (j.contains("outputs")) {
    const json& o = j["outputs"];
    c.outputs.records = get_or<std::string>(o, "records", c.outputs.records, "outputs.");
    c.outputs.summary = get_or<std::string>(o, "summary", c.outputs.summary, "outputs.");
    c.outputs.plot = get_or<std::string>(o, "plot", c.outputs.plot, "outputs.");
    c.outputs.manifest = get_or<std::string>(o, "manifest", c.outputs.manifest, "outputs.");
  }
  if (c.replications < 2) throw Error(ErrorKind::ParseError, "field 'replications': must be >= 2");
  if (c.etas.empty()) throw Error(ErrorKind::ParseError, "field 'etas': must be nonempty");
  for (std::size_t i = 1; i < c.etas.size(); ++i)
    if (!(c.etas[i] > c.etas[i - 1]))
      throw Error(ErrorKind::ParseError, "field 'etas': must be strictly increasing");
  if (c.pool_per_cell < 1 || c.visibility_probes < 0 || c.patience < 1 || c.b2_budget < 1)
    throw Error(ErrorKind::ParseError, "field 'budgets': values must be positive");
  return c;
}

std::string config_to_json(const ExperimentConfig& c) {
  json j{{"polytope", c.polytope},
         {"etas", c.etas},
         {"replications", c.replications},
         {"seed", c.seed},
         {"constants",
          {{"asymptotic", c.constants.asymptotic},
           {"alpha_desk", c.constants.alpha_desk},
           {"beta_desk", c.constants.beta_desk},
           {"b2", c.constants.b2}}},
         {"budgets",
          {{"cell_validation", c.cell_validation_budget},
           {"pool_per_cell", c.pool_per_cell},
           {"visibility_probes", c.visibility_probes},
           {"b2", c.b2_budget},
           {"patience", c.patience}}},
         {"ks_threshold", c.ks_threshold},
         {"outputs",
          {{"records", c.outputs.records},
           {"summary", c.outputs.summary},
           {"plot", c.outputs.plot},
           {"manifest", c.outputs.manifest}}}};
  return j.dump(2);
}

double ks_normal(std::vector<double> values) {
  const std::size_t n = values.size();
  if (n < 2) throw Error(ErrorKind::ZeroVariance, "need at least two values");
  const double m = mean_of(values);
  const double sd = std::sqrt(var_of(values));
  if (!(sd > 0.0)) throw Error(ErrorKind::ZeroVariance, "sample variance is zero");
  for (auto& v : values) v = (v - m) / sd;
  std::sort(values.begin(), values.end());
  double d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double phi = normal_cdf(values[i]);
    d = std::max(d, static_cast<double>(i + 1) / n - phi);
    d = std::max(d, phi - static_cast<double>(i) / n);
  }
  return d;
}

double rinott_bound(long vertex_count, long D, double M, double sigma) {
  if (!(sigma > 0.0)) throw Error(ErrorKind::InvalidSigma, "sigma must be positive");
  const double V = static_cast<double>(vertex_count), d = static_cast<double>(D);
  const double r = M / sigma;
  return d * r / std::sqrt(2.0 * std::numbers::pi) + 16.0 * std::sqrt(V) * std::pow(d, 1.5) * r * r +
         10.0 * V * d * d * r * r * r;
}

ExpectationReport expectation_check(const std::vector<ReplicationRecord>& records,
                                    const Polytope& p, double eta) {
  if (records.size() < 100)
    throw Error(ErrorKind::InsufficientReplications, "expectation check needs R >= 100");
  const int d = p.dim();
  const double F = static_cast<double>(flag_count(p));
  const double vol = p.volume();
  ExpectationReport out;
  const double theory = F / (std::pow(d + 1.0, d - 1) * factorial(d - 1)) / eta * log_pow(eta, d - 1);
  out.ratio_V = mean_of(zeta_V(records, vol)) / vol / theory;
  for (int l = 0; l < d; ++l)
    out.ratio_f.push_back(mean_of(face_values(records, l)) / (F * log_pow(eta, d - 1)));
  return out;
}

VarianceReport variance_check(const std::vector<ReplicationRecord>& records, const Polytope& p,
                              double eta) {
  const int d = p.dim();
  const double F = static_cast<double>(flag_count(p));
  VarianceReport out;
  out.warning = records.size() < 100;
  std::vector<double> v;
  for (const auto& r : records) v.push_back(r.V);
  out.ratio_V = var_of(v) * eta * eta / (F * log_pow(eta, d - 1));
  for (int l = 0; l < d; ++l)
    out.ratio_f.push_back(var_of(face_values(records, l)) / (F * log_pow(eta, d - 1)));
  return out;
}

TransferenceReport transference_diagnostics(const std::vector<ReplicationRecord>& records,
                                            double volume) {
  std::vector<ReplicationRecord> cond;
  for (const auto& r : records)
    if (r.A) cond.push_back(r);
  if (cond.size() < 100)
    throw Error(ErrorKind::InsufficientConditioned,
                std::to_string(cond.size()) + " replications with event A, need 100");
  TransferenceReport t;
  t.conditioned = static_cast<long>(cond.size());
  auto fill = [](const std::vector<double>& all, const std::vector<double>& sub, double& mean_shift,
                 double& var_shift, double& cdf) {
    const double var = var_of(all);
    mean_shift = var > 0 ? std::fabs(mean_of(sub) - mean_of(all)) / std::sqrt(var) : 0.0;
    var_shift = var > 0 ? std::fabs(var_of(sub) - var) / var : 0.0;
    cdf = ecdf_distance(all, sub);
  };
  fill(zeta_V(records, volume), zeta_V(cond, volume), t.mean_shift_V, t.var_shift_V,
       t.cdf_distance_V);
  fill(face_values(records, 0), face_values(cond, 0), t.mean_shift_f, t.var_shift_f,
       t.cdf_distance_f);
  return t;
}

MeanShift mean_shift_check(const std::vector<ReplicationRecord>& records, double volume) {
  MeanShift c;
  std::vector<double> all, a, not_a;
  for (const auto& r : records) {
    all.push_back(volume - r.V);
    (r.A ? a : not_a).push_back(volume - r.V);
  }
  if (a.empty() || all.empty()) return c;
  c.checked = true;
  const double p_not = static_cast<double>(not_a.size()) / static_cast<double>(all.size());
  c.lhs = std::fabs(mean_of(all) - mean_of(a));
  c.rhs = (mean_of(a) + mean_of(not_a)) * p_not;
  c.holds = c.lhs <= c.rhs * (1.0 + 1e-12) + 1e-15;
  return c;
}

CltReport clt_check(const std::vector<EtaSummary>& summaries, int dim, double threshold) {
  CltReport c;
  if (summaries.empty()) return c;
  const EtaSummary& last = summaries.back();
  c.threshold_pass = last.ks_V < threshold && !last.ks_f.empty() && last.ks_f[0] < threshold;
  for (const auto& s : summaries) {
    const double scale = std::pow(std::log(s.eta), 0.5 * (dim - 1));
    c.rate_V.push_back(s.ks_V * scale);
    c.rate_f0.push_back(s.ks_f.empty() ? 0.0 : s.ks_f[0] * scale);
  }
  c.trend_checked = summaries.size() >= 2;
  for (std::size_t i = 1; i < summaries.size(); ++i) {
    const double allowance = 2.0 * 1.63 / std::sqrt(static_cast<double>(summaries[i].R));
    if (summaries[i].ks_V > summaries[i - 1].ks_V + allowance) c.trend_pass = false;
    if (summaries[i].ks_f[0] > summaries[i - 1].ks_f[0] + allowance) c.trend_pass = false;
  }
  return c;
}

ExperimentResult run_experiment(const ExperimentConfig& config, const Checkpoint& checkpoint) {
  const Polytope p = parse_polytope_spec(config.polytope);
  const int d = p.dim();
  const int jobs = resolve_jobs(config.jobs);
  ExperimentResult result;
  result.dim = d;
  double b2 = config.constants.b2;
  if (!(b2 > 0.0)) b2 = fit_b2(p, config.seed, config.b2_budget, jobs);

  for (std::size_t e = 0; e < config.etas.size(); ++e) {
    const double eta = config.etas[e];
    const ExperimentScales scales = make_scales(d, eta, config.constants);
    GeometryOptions go;
    go.saturate.patience = config.patience;
    go.cells.validation_budget = config.cell_validation_budget;
    go.cells.pool_per_cell = config.pool_per_cell;
    go.cells.jobs = jobs;
    const std::uint64_t geo_seed = Rng::derive(config.seed, 1000 + e, 0).next();
    const ExperimentGeometry g = build_geometry(p, scales, geo_seed, go, b2);
    GraphOptions gopt;
    gopt.budget = config.visibility_probes;
    gopt.jobs = jobs;
    const DependencyGraph graph = build_graph(g.cells, scales.s, geo_seed + 1, gopt);

    std::vector<ReplicationRecord> recs(static_cast<std::size_t>(config.replications));
    parallel_for(recs.size(), jobs, [&](std::size_t k) {
      Rng rng = Rng::derive(config.seed, e, k);
      const Realization r = realize(sample_poisson(p, eta, rng), g);
      const ZetaVector zv = zeta_volume(r, g);
      ReplicationRecord& rec = recs[k];
      rec.eta = eta;
      rec.seed_index = static_cast<long>(k);
      rec.N = r.sample.N();
      rec.V = r.volume;
      rec.f = r.f;
      rec.A = r.event_A;
      rec.B = r.event_B;
      rec.sandwich_inner = r.sandwich_inner;
      rec.sandwich_outer = r.sandwich_outer;
      rec.max_zeta_vol = zv.max();
      rec.zeta_vol_exact = zv.exact;
      rec.count_slack = r.a_detail.count_slack;
      for (int l = 0; l < d; ++l) {
        const ZetaVector zf = zeta_faces(r, g, l);
        if (l == 0) rec.max_zeta_face = zf.max();
        rec.zeta_face_exact = rec.zeta_face_exact && (zf.exact || !zf.simplicial);
        rec.simplicial = rec.simplicial && zf.simplicial;
      }
    });

    EtaSummary s;
    s.eta = eta;
    s.R = config.replications;
    s.scales = scales;
    s.b2 = g.b2;
    s.F = g.F;
    s.seed = config.seed;
    s.m = g.m();
    s.D = graph.D;
    s.M_vol = g.M_vol;
    s.within_s0 = g.covering.system.within_s0;
    std::vector<double> V;
    for (const auto& r : recs) V.push_back(r.V);
    s.mean_V = mean_of(V);
    s.var_V = var_of(V);
    s.ks_V = s.var_V > 0 ? ks_normal(V) : 1.0;
    for (int l = 0; l < d; ++l) {
      const auto f = face_values(recs, l);
      s.mean_f.push_back(mean_of(f));
      s.var_f.push_back(var_of(f));
      s.ks_f.push_back(var_of(f) > 0 ? ks_normal(f) : 1.0);
    }
    long a = 0, b = 0, sw = 0;
    for (const auto& r : recs) {
      a += r.A;
      b += r.B;
      sw += r.sandwich_inner && r.sandwich_outer;
      if (r.A && !(r.sandwich_inner && r.sandwich_outer)) ++s.sandwich_exceptions;
      s.bookkeeping_failures += !r.zeta_vol_exact || !r.zeta_face_exact;
      s.nonsimplicial += !r.simplicial;
      s.M_face = std::max(s.M_face, r.max_zeta_face);
      s.max_count_slack = std::max(s.max_count_slack, r.count_slack);
    }
    s.A_count = a;
    s.p_A = static_cast<double>(a) / s.R;
    s.p_B = static_cast<double>(b) / s.R;
    s.p_sandwich = static_cast<double>(sw) / s.R;
    if (s.R >= 100) s.expectation = expectation_check(recs, p, eta);
    s.variance = variance_check(recs, p, eta);
    const double sd_V = std::sqrt(s.var_V), sd_f = std::sqrt(s.var_f[0]);
    s.rinott_V = sd_V > 0 ? rinott_bound(s.m, s.D, s.M_vol, sd_V) : NAN;
    s.rinott_f = sd_f > 0 ? rinott_bound(s.m, s.D, s.M_face, sd_f) : NAN;
    s.graph_reflexive = graph.reflexive();
    s.graph_symmetric = graph.symmetric();
    s.degree_consistent = graph.degree_consistent();
    for (int i = 0; i < graph.m; ++i) s.max_SkLi = std::max(s.max_SkLi, count_SkLi(graph, i));
    s.D_ratio = s.D / (std::pow(static_cast<double>(s.F), 6) * std::pow(lln(eta), 6.0 * (d - 1)));
    try {
      s.transference = transference_diagnostics(recs, p.volume());
    } catch (const Error& err) {
      s.transference_note = err.what();
    }
    s.mean_shift = mean_shift_check(recs, p.volume());

    result.records.insert(result.records.end(), recs.begin(), recs.end());
    result.summaries.push_back(std::move(s));
    result.graphs.push_back(graph.to_dot());
    if (checkpoint) checkpoint(result);
  }
  return result;
}

std::string records_csv(const ExperimentResult& result) {
  std::ostringstream out;
  out << "eta,seed_index,N,V";
  for (int l = 0; l < result.dim; ++l) out << ",f_" << l;
  out << ",A,B,sandwich_inner,sandwich_outer,max_zeta_vol,max_zeta_face\n";
  char buf[64];
  for (const auto& r : result.records) {
    std::snprintf(buf, sizeof buf, "%.17g", r.eta);
    out << buf << ',' << r.seed_index << ',' << r.N << ',';
    std::snprintf(buf, sizeof buf, "%.17g", r.V);
    out << buf;
    for (long f : r.f) out << ',' << f;
    out << ',' << r.A << ',' << r.B << ',' << r.sandwich_inner << ',' << r.sandwich_outer << ',';
    std::snprintf(buf, sizeof buf, "%.17g", r.max_zeta_vol);
    out << buf << ',';
    std::snprintf(buf, sizeof buf, "%.17g", r.max_zeta_face);
    out << buf << '\n';
  }
  return out.str();
}

std::string summary_json(const ExperimentResult& result, const ExperimentConfig& config) {
  json list = json::array();
  for (const auto& s : result.summaries) {
    const auto& sc = s.scales;
    json ratio_f = json::array(), var_ratio_f = json::array();
    if (s.expectation)
      for (double r : s.expectation->ratio_f) ratio_f.push_back(r);
    for (double r : s.variance.ratio_f) var_ratio_f.push_back(r);
    json j{{"eta", s.eta},
           {"R", s.R},
           {"mean_V", s.mean_V},
           {"var_V", s.var_V},
           {"mean_f", s.mean_f},
           {"var_f", s.var_f},
           {"ks_V", s.ks_V},
           {"ks_f", s.ks_f},
           {"p_A", s.p_A},
           {"p_B", s.p_B},
           {"p_sandwich", s.p_sandwich},
           {"ratio_V", s.expectation ? json(s.expectation->ratio_V) : json(nullptr)},
           {"ratio_f", ratio_f},
           {"var_ratio_V", s.variance.ratio_V},
           {"var_ratio_f", var_ratio_f},
           {"variance_warning", s.variance.warning},
           {"rinott_V", number_or_null(s.rinott_V)},
           {"rinott_f", number_or_null(s.rinott_f)},
           {"D", s.D},
           {"m", s.m},
           {"M_vol", s.M_vol},
           {"M_face", s.M_face},
           {"constants",
            {{"asymptotic", sc.asymptotic_constants},
             {"alpha", sc.alpha},
             {"beta", sc.beta},
             {"scale_factor", sc.scale_factor},
             {"b2", s.b2},
             {"T", sc.T},
             {"T_star", sc.T_star},
             {"s", sc.s},
             {"U", sc.U},
             {"U_star", sc.U_star},
             {"gamma", sc.gamma},
             {"F", s.F},
             {"within_s0", s.within_s0}}},
           {"seed", s.seed},
           {"diagnostics",
            {{"A_count", s.A_count},
             {"sandwich_exceptions", s.sandwich_exceptions},
             {"bookkeeping_failures", s.bookkeeping_failures},
             {"nonsimplicial", s.nonsimplicial},
             {"graph_reflexive", s.graph_reflexive},
             {"graph_symmetric", s.graph_symmetric},
             {"degree_consistent", s.degree_consistent},
             {"max_SkLi", s.max_SkLi},
             {"D_ratio", s.D_ratio},
             {"probe_budget", config.visibility_probes},
             {"max_count_slack", s.max_count_slack},
             {"mean_shift", {{"checked", s.mean_shift.checked},
                          {"holds", s.mean_shift.holds},
                          {"lhs", s.mean_shift.lhs},
                          {"rhs", s.mean_shift.rhs}}}}}};
    if (s.transference) {
      const auto& t = *s.transference;
      j["diagnostics"]["transference"] = {{"conditioned", t.conditioned},
                                          {"mean_shift_V", t.mean_shift_V},
                                          {"var_shift_V", t.var_shift_V},
                                          {"cdf_distance_V", t.cdf_distance_V},
                                          {"mean_shift_f", t.mean_shift_f},
                                          {"var_shift_f", t.var_shift_f},
                                          {"cdf_distance_f", t.cdf_distance_f}};
    } else {
      j["diagnostics"]["transference"] = {{"skipped", s.transference_note}};
    }
    list.push_back(std::move(j));
  }
  const CltReport clt = clt_check(result.summaries, result.dim, config.ks_threshold);
  json checks{{"clt",
               {{"threshold", config.ks_threshold},
                {"threshold_pass", clt.threshold_pass},
                {"trend_checked", clt.trend_checked},
                {"trend_pass", clt.trend_pass},
                {"rate_V", clt.rate_V},
                {"rate_f0", clt.rate_f0}}}};
  if (result.summaries.size() >= 2 && result.summaries.front().expectation &&
      result.summaries.back().expectation) {
    const double first = result.summaries.front().expectation->ratio_V;
    const double last = result.summaries.back().expectation->ratio_V;
    checks["expectation"] = {{"ratio_V_last", last},
                             {"in_window", last >= 0.7 && last <= 1.3},
                             {"drifts_to_one", std::fabs(last - 1) < std::fabs(first - 1)}};
  }
  bool sandwich_monotone = true;
  for (std::size_t i = 1; i < result.summaries.size(); ++i)
    sandwich_monotone = sandwich_monotone &&
                        result.summaries[i].p_sandwich >= result.summaries[i - 1].p_sandwich;
  checks["sandwich"] = {
      {"p_last", result.summaries.empty() ? 0.0 : result.summaries.back().p_sandwich},
      {"nondecreasing", sandwich_monotone}};
  return json{{"summaries", list}, {"checks", checks}}.dump(2);
}

std::string plot_tsv(const ExperimentResult& result) {
  std::ostringstream out;
  out << "eta\tks_V\tks_f0\tratio_V\n";
  char buf[160];
  for (const auto& s : result.summaries) {
    std::snprintf(buf, sizeof buf, "%.17g\t%.17g\t%.17g\t", s.eta, s.ks_V,
                  s.ks_f.empty() ? 0.0 : s.ks_f[0]);
    out << buf;
    if (s.expectation) {
      std::snprintf(buf, sizeof buf, "%.17g", s.expectation->ratio_V);
      out << buf;
    } else {
      out << "nan";
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace polylab
