#pragma once

#include "polylab/depgraph.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace polylab {

/// Which constants drive the scales. Desk values replace the asymptotic alpha
/// and beta, which make every event trivial at reachable eta.
struct ConstantsConfig {
  bool asymptotic = false;
  double alpha_desk = 2.0;
  double beta_desk = 4.0;
  double b2 = 0.0;  // 0: fitted from the wet-part window before the run
};

double asymptotic_alpha(int dim);
double asymptotic_beta(int dim);

/// ln(ln x).
double lln(double x);

struct ExperimentScales {
  int dim = 0;
  double eta = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double scale_factor = 1.0;  // active alpha / asymptotic alpha
  bool asymptotic_constants = false;
  double T = 0.0;
  double T_star = 0.0;
  double s = 0.0;
  double U = 0.0;
  double U_star = 0.0;
  double gamma = 0.0;
};

/// Throws InvalidIntensity unless eta > e^e and T > s.
ExperimentScales make_scales(int dim, double eta, const ConstantsConfig& constants = {});

struct PoissonSample {
  double eta = 0.0;
  PointList points;
  long N() const { return static_cast<long>(points.size()); }
};

/// Throws InvalidIntensity when eta V(P) <= 0.
PoissonSample sample_poisson(const Polytope& p, double eta, Rng& rng);

/// (3 / (3 - e)) e^{-p}, an upper bound for P(N >= 3p) with N ~ Poisson(p).
double poisson_tail_bound(double p);
/// Exact P(N >= k) for N ~ Poisson(p).
double poisson_upper_tail(double p, long k);

/// Everything that depends on eta only through the scales; shared by all
/// replications at one eta.
struct ExperimentGeometry {
  const Polytope* polytope = nullptr;
  ExperimentScales scales;
  long long F = 0;  // flag count
  double b2 = 0.0;
  CapCovering covering;
  CellDecomposition cells;
  std::shared_ptr<const LevelSet> event_b_body;  // P(v >= U*)
  std::vector<double> trimmed_volume;            // V(S'_j) estimates
  double M_vol = 0.0;                            // max_j V(S'_j)
  double count_bound = 0.0;                      // 3 (6 gamma)^d alpha lln eta
  double wet_u_bound = 0.0;                      // 3 b2 F ln^d eta

  int m() const { return covering.m(); }
};

struct GeometryOptions {
  SaturateOptions saturate;
  CellOptions cells;
  long b2_budget = 40000;
};

/// Upper window constant of V(P(v <= s)) / (F s ln^{d-1}(1/s)) over
/// s in {1e-2, 1e-3, 1e-4}, times d 6^d (the count scale of event B).
double fit_b2(const Polytope& p, std::uint64_t seed, long budget, int jobs = 1);

ExperimentGeometry build_geometry(const Polytope& p, const ExperimentScales& scales,
                                  std::uint64_t seed, const GeometryOptions& options = {},
                                  double b2 = 0.0);

struct EventA {
  bool holds = false;
  int empty_inner_sets = 0;    // K'_j without a point
  long wet_points = 0;         // points in P(v <= s)
  long max_trimmed_count = 0;  // max_j |S'_j ∩ X|
  long trimmed_total = 0;      // |P(v <= T*) ∩ X|
  double count_slack = 0.0;    // max count / bound
};

EventA event_A(const PoissonSample& sample, const ExperimentGeometry& geometry);

/// Inclusion of P(v >= U*) checked on its level points.
bool event_B(const PoissonSample& sample, const HullComplex& hull,
             const ExperimentGeometry& geometry);

struct Realization {
  PoissonSample sample;
  HullComplex hull;
  double volume = 0.0;
  std::vector<long> f;
  bool sandwich_inner = false;
  bool sandwich_outer = false;
  bool event_A = false;
  bool event_B = false;
  EventA a_detail;
};

Realization realize(PoissonSample sample, const ExperimentGeometry& geometry);

struct ZetaVector {
  std::vector<double> values;
  double overflow = 0.0;  // missed volume the cells could not account for
  double total = 0.0;
  bool exact = true;  // bookkeeping identity holds
  bool simplicial = true;

  double max() const;
};

/// Missed volume per cell: sum + overflow = V(P) - V(Pi).
ZetaVector zeta_volume(const Realization& r, const ExperimentGeometry& geometry);

/// (1/(l+1)) times the number of vertices of l-faces in each cell.
ZetaVector zeta_faces(const Realization& r, const ExperimentGeometry& geometry, int l);

}  // namespace polylab
