#pragma once

#include "polylab/process.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace polylab {

struct OutputPaths {
  std::string records = "records.csv";
  std::string summary = "summary.json";
  std::string plot = "plot.tsv";
  std::string manifest = "manifest.json";
};

struct ExperimentConfig {
  std::string polytope = "cube:2";
  std::vector<double> etas;
  int replications = 2;
  std::uint64_t seed = 1;
  ConstantsConfig constants;
  long cell_validation_budget = 10000;
  long pool_per_cell = 4096;
  int visibility_probes = 256;
  long b2_budget = 40000;
  int patience = 200;
  double ks_threshold = 0.05;
  int jobs = 0;
  OutputPaths outputs;
};

/// Throws ParseError naming the offending field.
ExperimentConfig parse_config(const std::string& json_text);
std::string config_to_json(const ExperimentConfig& config);

struct ReplicationRecord {
  double eta = 0.0;
  long seed_index = 0;
  long N = 0;
  double V = 0.0;
  std::vector<long> f;
  bool A = false;
  bool B = false;
  bool sandwich_inner = false;
  bool sandwich_outer = false;
  double max_zeta_vol = 0.0;
  double max_zeta_face = 0.0;
  bool zeta_vol_exact = true;
  bool zeta_face_exact = true;
  bool simplicial = true;
  double count_slack = 0.0;
};

/// One-sample Kolmogorov-Smirnov distance of the standardized values to the
/// standard normal. Throws ZeroVariance.
double ks_normal(std::vector<double> values);

/// Three-term bound of Rinott's theorem. Throws InvalidSigma unless sigma > 0.
double rinott_bound(long vertex_count, long D, double M, double sigma);

struct ExpectationReport {
  double ratio_V = 0.0;
  std::vector<double> ratio_f;
};
/// Throws InsufficientReplications when fewer than 100 records.
ExpectationReport expectation_check(const std::vector<ReplicationRecord>& records,
                                    const Polytope& p, double eta);

struct VarianceReport {
  double ratio_V = 0.0;
  std::vector<double> ratio_f;
  bool warning = false;  // fewer than 100 records: no assertion
};
VarianceReport variance_check(const std::vector<ReplicationRecord>& records, const Polytope& p,
                              double eta);

struct TransferenceReport {
  long conditioned = 0;
  double mean_shift_V = 0.0, var_shift_V = 0.0, cdf_distance_V = 0.0;
  double mean_shift_f = 0.0, var_shift_f = 0.0, cdf_distance_f = 0.0;
};
/// Conditioned on event A versus all records, for zeta = V(P) - V and f_0.
/// Throws InsufficientConditioned below 100 A-true records.
TransferenceReport transference_diagnostics(const std::vector<ReplicationRecord>& records,
                                            double volume);

/// |E z - E(z|A)| <= (E(z|A) + E(z|not A)) P(not A) on empirical means.
struct MeanShift {
  bool checked = false;
  bool holds = true;
  double lhs = 0.0, rhs = 0.0;
};
MeanShift mean_shift_check(const std::vector<ReplicationRecord>& records, double volume);

struct EtaSummary {
  double eta = 0.0;
  int R = 0;
  double mean_V = 0.0, var_V = 0.0;
  std::vector<double> mean_f, var_f;
  double ks_V = 0.0;
  std::vector<double> ks_f;
  double p_A = 0.0, p_B = 0.0, p_sandwich = 0.0;
  std::optional<ExpectationReport> expectation;
  VarianceReport variance;
  double rinott_V = 0.0, rinott_f = 0.0;
  int D = 0, m = 0;
  double M_vol = 0.0, M_face = 0.0;
  ExperimentScales scales;
  double b2 = 0.0;
  long long F = 0;
  std::uint64_t seed = 0;
  // Structure diagnostics.
  long sandwich_exceptions = 0;  // A true but a sandwich flag false
  long A_count = 0;
  long bookkeeping_failures = 0;
  long nonsimplicial = 0;
  bool graph_reflexive = true, graph_symmetric = true, degree_consistent = true;
  int max_SkLi = 0;
  double D_ratio = 0.0;
  double max_count_slack = 0.0;
  std::optional<TransferenceReport> transference;
  std::string transference_note;
  MeanShift mean_shift;
  bool within_s0 = true;
};

struct CltReport {
  bool threshold_pass = false;  // KS at the largest eta below the threshold
  bool trend_checked = false;
  bool trend_pass = true;       // nonincreasing within 2 * 1.63 / sqrt(R)
  std::vector<double> rate_V;   // KS * (ln eta)^{(d-1)/2}
  std::vector<double> rate_f0;
};
CltReport clt_check(const std::vector<EtaSummary>& summaries, int dim, double threshold);

struct ExperimentResult {
  int dim = 0;
  std::vector<ReplicationRecord> records;
  std::vector<EtaSummary> summaries;
  std::vector<std::string> graphs;  // DOT per eta
};

/// Called after each completed eta with the results so far.
using Checkpoint = std::function<void(const ExperimentResult&)>;

ExperimentResult run_experiment(const ExperimentConfig& config, const Checkpoint& checkpoint = {});

std::string records_csv(const ExperimentResult& result);
/// {"summaries": [...], "checks": {...}}
std::string summary_json(const ExperimentResult& result, const ExperimentConfig& config);
std::string plot_tsv(const ExperimentResult& result);

}  // namespace polylab
