#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace polylab {

/// Largest ambient dimension supported. Small fixed capacity keeps every
/// point/matrix on the stack.
inline constexpr int kMaxDim = 6;

using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor,
                          kMaxDim, kMaxDim>;
using PointList = std::vector<Vec>;

// Incidence / membership tolerance.
inline constexpr double kTauGeom = 1e-9;
// Relative volume tolerance.
inline constexpr double kTauVol = 1e-9;
// Relative tolerance on level-set values v(z) = s.
inline constexpr double kTauLevel = 1e-6;
// Relative tolerance of the minimal-cap search.
inline constexpr double kTauV = 1e-6;

/// Closed half-space {x : normal . x <= offset}.
struct Halfspace {
  Vec normal;
  double offset = 0.0;

  double slack(const Vec& x) const { return offset - normal.dot(x); }
};

enum class ErrorKind {
  DegenerateInput,
  DegenerateHull,
  InvalidDepth,
  BoundaryPoint,
  LevelNotBracketed,
  PreconditionViolated,
  LevelTooHigh,
  CellInvariantViolated,
  InvalidIntensity,
  InvalidSigma,
  ZeroVariance,
  InsufficientConditioned,
  InsufficientReplications,
  ParseError,
  Runtime,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Process exit code associated with an error kind (CLI contract).
int exit_code_for(ErrorKind kind);

inline Vec make_vec(std::initializer_list<double> values) {
  Vec v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

inline Vec zeros(int d) { return Vec::Zero(d); }

}  // namespace polylab
