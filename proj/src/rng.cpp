#include "polylab/rng.hpp"

#include <cmath>
#include <numbers>

namespace polylab {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DegenerateInput: return "DegenerateInput";
    case ErrorKind::DegenerateHull: return "DegenerateHull";
    case ErrorKind::InvalidDepth: return "InvalidDepth";
    case ErrorKind::BoundaryPoint: return "BoundaryPoint";
    case ErrorKind::LevelNotBracketed: return "LevelNotBracketed";
    case ErrorKind::PreconditionViolated: return "PreconditionViolated";
    case ErrorKind::LevelTooHigh: return "LevelTooHigh";
    case ErrorKind::CellInvariantViolated: return "CellInvariantViolated";
    case ErrorKind::InvalidIntensity: return "InvalidIntensity";
    case ErrorKind::InvalidSigma: return "InvalidSigma";
    case ErrorKind::ZeroVariance: return "ZeroVariance";
    case ErrorKind::InsufficientConditioned: return "InsufficientConditioned";
    case ErrorKind::InsufficientReplications: return "InsufficientReplications";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::Runtime: return "Runtime";
  }
  return "Unknown";
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ParseError:
      return 2;
    case ErrorKind::DegenerateInput:
    case ErrorKind::DegenerateHull:
    case ErrorKind::InvalidDepth:
    case ErrorKind::BoundaryPoint:
    case ErrorKind::LevelNotBracketed:
    case ErrorKind::CellInvariantViolated:
      return 3;
    case ErrorKind::PreconditionViolated:
    case ErrorKind::LevelTooHigh:
    case ErrorKind::InvalidIntensity:
    case ErrorKind::InvalidSigma:
    case ErrorKind::InsufficientReplications:
      return 4;
    default:
      return 5;
  }
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // Marsaglia polar method.
  double x, y, r2;
  do {
    x = 2.0 * uniform() - 1.0;
    y = 2.0 * uniform() - 1.0;
    r2 = x * x + y * y;
  } while (r2 >= 1.0 || r2 == 0.0);
  const double f = std::sqrt(-2.0 * std::log(r2) / r2);
  spare_ = y * f;
  has_spare_ = true;
  return x * f;
}

Vec Rng::direction(int d) {
  Vec u(d);
  double n2;
  do {
    for (int i = 0; i < d; ++i) u[i] = normal();
    n2 = u.squaredNorm();
  } while (n2 < 1e-24);
  return u / std::sqrt(n2);
}

std::uint64_t Rng::poisson(double mean) {
  if (!(mean > 0.0)) return 0;
  if (mean < 30.0) {
    // Sequential-search inversion.
    const double u = uniform();
    double p = std::exp(-mean);
    double cdf = p;
    std::uint64_t k = 0;
    while (u > cdf) {
      ++k;
      p *= mean / static_cast<double>(k);
      cdf += p;
      if (p < 1e-300 && cdf >= 1.0 - 1e-15) break;
    }
    return k;
  }
  // PTRS (Hormann 1993).
  const double slam = std::sqrt(mean);
  const double loglam = std::log(mean);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double invalpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    const double u = uniform() - 0.5;
    const double v = uniform();
    const double us = 0.5 - std::fabs(u);
    const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= vr) return static_cast<std::uint64_t>(k);
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(invalpha) - std::log(a / (us * us) + b) <=
        -mean + k * loglam - std::lgamma(k + 1.0)) {
      return static_cast<std::uint64_t>(k);
    }
  }
}

}  // namespace polylab
