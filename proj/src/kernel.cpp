#include "polylab/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace polylab {

Vec hyperplane_normal(std::span<const Vec> pts) {
  const int d = static_cast<int>(pts[0].size());
  if (d == 2) {
    const Vec e = pts[1] - pts[0];
    return make_vec({-e[1], e[0]});
  }
  if (d == 3) {
    const Eigen::Vector3d a = (pts[1] - pts[0]).head<3>();
    const Eigen::Vector3d b = (pts[2] - pts[0]).head<3>();
    const Eigen::Vector3d c = a.cross(b);
    return make_vec({c[0], c[1], c[2]});
  }
  // Cofactor expansion along a formal row of basis vectors.
  Mat edges(d - 1, d);
  for (int i = 1; i < d; ++i) edges.row(i - 1) = (pts[i] - pts[0]).transpose();
  Vec n(d);
  Mat minor(d - 1, d - 1);
  for (int j = 0; j < d; ++j) {
    for (int c = 0, cc = 0; c < d; ++c) {
      if (c == j) continue;
      minor.col(cc++) = edges.col(c);
    }
    const double sign = (j % 2 == 0) ? 1.0 : -1.0;
    n[j] = sign * minor.determinant();
  }
  return n;
}

Mat affine_basis(std::span<const Vec> pts, int& rank, double tol) {
  rank = 0;
  if (pts.empty()) return Mat(0, 0);
  const int d = static_cast<int>(pts[0].size());
  Mat basis(d, d);
  double scale = 1.0;
  for (const auto& p : pts) scale = std::max(scale, (p - pts[0]).cwiseAbs().maxCoeff());
  // Greedy Gram-Schmidt on the point offering the largest residual.
  std::vector<Vec> residuals;
  residuals.reserve(pts.size());
  for (const auto& p : pts) residuals.push_back(p - pts[0]);
  while (rank < d) {
    double best = 0.0;
    int best_i = -1;
    for (int i = 0; i < static_cast<int>(residuals.size()); ++i) {
      const double n = residuals[i].norm();
      if (n > best) {
        best = n;
        best_i = i;
      }
    }
    if (best_i < 0 || best <= tol * scale) break;
    const Vec e = residuals[best_i] / best;
    basis.row(rank++) = e.transpose();
    for (auto& r : residuals) r -= e.dot(r) * e;
  }
  return basis.topRows(rank);
}

int affine_rank(std::span<const Vec> pts, double tol) {
  int rank = 0;
  affine_basis(pts, rank, tol);
  return rank;
}

double simplex_volume(std::span<const Vec> pts) {
  const int d = static_cast<int>(pts.size()) - 1;
  Mat m(d, d);
  for (int i = 0; i < d; ++i) m.col(i) = pts[i + 1] - pts[0];
  double fact = 1.0;
  for (int i = 2; i <= d; ++i) fact *= i;
  return std::fabs(m.determinant()) / fact;
}

namespace {

// Rows stored densely: row r has `dim` coefficients then the offset.
struct Rows {
  int dim = 0;
  std::vector<double> data;  // count * (dim + 1)
  int count() const { return static_cast<int>(data.size()) / (dim + 1); }
  double* row(int r) { return data.data() + static_cast<std::size_t>(r) * (dim + 1); }
  const double* row(int r) const {
    return data.data() + static_cast<std::size_t>(r) * (dim + 1);
  }
};

// Normalizes rows, drops zero rows (returns false if one is infeasible) and
// removes duplicated hyperplanes.
bool clean_rows(Rows& rows) {
  const int d = rows.dim;
  Rows out;
  out.dim = d;
  out.data.reserve(rows.data.size());
  for (int r = 0; r < rows.count(); ++r) {
    const double* a = rows.row(r);
    double n2 = 0.0;
    for (int j = 0; j < d; ++j) n2 += a[j] * a[j];
    const double n = std::sqrt(n2);
    if (n < 1e-12) {
      if (a[d] < -1e-12) return false;
      continue;
    }
    bool duplicate = false;
    for (int q = 0; q < out.count() && !duplicate; ++q) {
      const double* o = out.row(q);
      bool same = std::fabs(o[d] - a[d] / n) < 1e-12;
      for (int j = 0; j < d && same; ++j) same = std::fabs(o[j] - a[j] / n) < 1e-12;
      duplicate = same;
    }
    if (duplicate) continue;
    for (int j = 0; j <= d; ++j) out.data.push_back(a[j] / n);
  }
  rows = std::move(out);
  return true;
}

double lasserre(Rows rows) {
  const int d = rows.dim;
  if (!clean_rows(rows)) return 0.0;
  const int m = rows.count();
  if (d == 1) {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    for (int r = 0; r < m; ++r) {
      const double* a = rows.row(r);
      if (a[0] > 0) hi = std::min(hi, a[1] / a[0]);
      else lo = std::max(lo, a[1] / a[0]);
    }
    if (!std::isfinite(lo) || !std::isfinite(hi)) {
      throw Error(ErrorKind::DegenerateInput, "unbounded half-space system");
    }
    return std::max(0.0, hi - lo);
  }
  double total = 0.0;
  Rows sub;
  sub.dim = d - 1;
  for (int i = 0; i < m; ++i) {
    const double* ai = rows.row(i);
    if (std::fabs(ai[d]) < 1e-300) continue;  // zero-height cone contributes nothing
    int k = 0;
    for (int j = 1; j < d; ++j)
      if (std::fabs(ai[j]) > std::fabs(ai[k])) k = j;
    const double pivot = ai[k];
    sub.data.clear();
    for (int r = 0; r < m; ++r) {
      if (r == i) continue;
      const double* ar = rows.row(r);
      const double f = ar[k] / pivot;
      for (int j = 0; j < d; ++j) {
        if (j == k) continue;
        sub.data.push_back(ar[j] - f * ai[j]);
      }
      sub.data.push_back(ar[d] - f * ai[d]);
    }
    const double face = lasserre(sub);
    total += ai[d] * face / std::fabs(pivot);
  }
  return total / d;
}

}  // namespace

double halfspace_volume(std::span<const Halfspace> hs, int dim, const Vec& origin) {
  Rows rows;
  rows.dim = dim;
  rows.data.reserve(hs.size() * (dim + 1));
  for (const auto& h : hs) {
    for (int j = 0; j < dim; ++j) rows.data.push_back(h.normal[j]);
    rows.data.push_back(h.offset - h.normal.dot(origin));
  }
  return std::max(0.0, lasserre(std::move(rows)));
}

namespace {

// Dense tableau simplex: maximize c.x subject to A x <= b, x >= 0.
// Bland's rule; phase one via an auxiliary variable.
class TableauLp {
 public:
  TableauLp(const std::vector<std::vector<double>>& a, const std::vector<double>& b,
            const std::vector<double>& c)
      : m_(static_cast<int>(b.size())),
        n_(static_cast<int>(c.size())),
        nonbasic_(n_ + 1),
        basic_(m_),
        t_(m_ + 2, std::vector<double>(n_ + 2, 0.0)) {
    for (int i = 0; i < m_; ++i)
      for (int j = 0; j < n_; ++j) t_[i][j] = a[i][j];
    for (int i = 0; i < m_; ++i) {
      basic_[i] = n_ + i;
      t_[i][n_] = -1.0;
      t_[i][n_ + 1] = b[i];
    }
    for (int j = 0; j < n_; ++j) {
      nonbasic_[j] = j;
      t_[m_][j] = -c[j];
    }
    nonbasic_[n_] = -1;
    t_[m_ + 1][n_] = 1.0;
  }

  // Returns optimum value; -inf when infeasible, +inf when unbounded.
  double solve(std::vector<double>& x) {
    int r = 0;
    for (int i = 1; i < m_; ++i)
      if (t_[i][n_ + 1] < t_[r][n_ + 1]) r = i;
    if (t_[r][n_ + 1] < -kEps) {
      pivot(r, n_);
      if (!run(2) || t_[m_ + 1][n_ + 1] < -kEps) return -std::numeric_limits<double>::infinity();
      for (int i = 0; i < m_; ++i) {
        if (basic_[i] == -1) {
          int s = 0;
          for (int j = 1; j <= n_; ++j)
            if (better(t_[i], j, s)) s = j;
          pivot(i, s);
        }
      }
    }
    const bool bounded = run(1);
    x.assign(n_, 0.0);
    for (int i = 0; i < m_; ++i)
      if (basic_[i] < n_) x[basic_[i]] = t_[i][n_ + 1];
    return bounded ? t_[m_][n_ + 1] : std::numeric_limits<double>::infinity();
  }

 private:
  static constexpr double kEps = 1e-12;

  bool better(const std::vector<double>& row, int j, int s) const {
    return row[j] < row[s] || (row[j] == row[s] && nonbasic_[j] < nonbasic_[s]);
  }

  void pivot(int r, int s) {
    const double inv = 1.0 / t_[r][s];
    for (int i = 0; i < m_ + 2; ++i) {
      if (i == r || std::fabs(t_[i][s]) <= kEps) continue;
      const double f = t_[i][s] * inv;
      for (int j = 0; j < n_ + 2; ++j) t_[i][j] -= t_[r][j] * f;
      t_[i][s] = t_[r][s] * f;
    }
    for (int j = 0; j < n_ + 2; ++j)
      if (j != s) t_[r][j] *= inv;
    for (int i = 0; i < m_ + 2; ++i)
      if (i != r) t_[i][s] *= -inv;
    t_[r][s] = inv;
    std::swap(basic_[r], nonbasic_[s]);
  }

  bool run(int phase) {
    const int x = m_ + phase - 1;
    for (int iter = 0; iter < 10000; ++iter) {
      int s = -1;
      for (int j = 0; j <= n_; ++j) {
        if (nonbasic_[j] == -phase) continue;
        if (s == -1 || better(t_[x], j, s)) s = j;
      }
      if (t_[x][s] >= -kEps) return true;
      int r = -1;
      for (int i = 0; i < m_; ++i) {
        if (t_[i][s] <= kEps) continue;
        if (r == -1) {
          r = i;
          continue;
        }
        const double lhs = t_[i][n_ + 1] / t_[i][s];
        const double rhs = t_[r][n_ + 1] / t_[r][s];
        if (lhs < rhs || (lhs == rhs && basic_[i] < basic_[r])) r = i;
      }
      if (r == -1) return false;
      pivot(r, s);
    }
    return true;
  }

  int m_, n_;
  std::vector<int> nonbasic_, basic_;
  std::vector<std::vector<double>> t_;
};

}  // namespace

std::optional<ChebyshevResult> chebyshev_center(std::span<const Halfspace> hs, int dim) {
  if (hs.empty()) return std::nullopt;
  // Shift to a reference point to keep the tableau well scaled, then split
  // free variables x = x+ - x-, t = t+ - t-.
  Vec ref = Vec::Zero(dim);
  double scale = 1.0;
  for (const auto& h : hs) scale = std::max(scale, std::fabs(h.offset));
  const int nv = 2 * (dim + 1);
  std::vector<std::vector<double>> a;
  std::vector<double> b;
  a.reserve(hs.size() + 1);
  for (const auto& h : hs) {
    const double norm = h.normal.norm();
    if (norm < 1e-300) {
      if (h.offset < -kTauGeom) return ChebyshevResult{-std::numeric_limits<double>::infinity(), ref};
      continue;
    }
    std::vector<double> row(nv);
    for (int j = 0; j < dim; ++j) {
      row[j] = h.normal[j] / norm;
      row[dim + 1 + j] = -h.normal[j] / norm;
    }
    row[dim] = 1.0;
    row[2 * dim + 1] = -1.0;
    a.push_back(std::move(row));
    b.push_back((h.offset - h.normal.dot(ref)) / norm);
  }
  // Cap the radius so the LP stays bounded.
  std::vector<double> cap(nv, 0.0);
  cap[dim] = 1.0;
  cap[2 * dim + 1] = -1.0;
  a.push_back(cap);
  b.push_back(1e3 * scale);
  std::vector<double> c(nv, 0.0);
  c[dim] = 1.0;
  c[2 * dim + 1] = -1.0;
  TableauLp lp(a, b, c);
  std::vector<double> x;
  const double value = lp.solve(x);
  if (!std::isfinite(value)) {
    if (value < 0) return ChebyshevResult{-std::numeric_limits<double>::infinity(), ref};
    return std::nullopt;
  }
  ChebyshevResult out;
  out.radius = value;
  out.center = ref;
  for (int j = 0; j < dim; ++j) out.center[j] += x[j] - x[dim + 1 + j];
  return out;
}

bool halfspaces_feasible(std::span<const Halfspace> hs, int dim, double tol) {
  const auto res = chebyshev_center(hs, dim);
  if (!res) return true;
  return res->radius >= -tol;
}

PointList enumerate_vertices(std::span<const Halfspace> hs, int dim, double tol) {
  const int m = static_cast<int>(hs.size());
  PointList out;
  std::vector<int> pick(dim);
  std::iota(pick.begin(), pick.end(), 0);
  double scale = 1.0;
  for (const auto& h : hs) scale = std::max(scale, std::fabs(h.offset) / std::max(1e-300, h.normal.norm()));
  auto push_unique = [&](const Vec& x) {
    for (const auto& y : out)
      if ((y - x).cwiseAbs().maxCoeff() <= 1e3 * tol * scale) return;
    out.push_back(x);
  };
  if (m < dim) return out;
  for (;;) {
    Mat a(dim, dim);
    Vec b(dim);
    for (int r = 0; r < dim; ++r) {
      a.row(r) = hs[pick[r]].normal.transpose();
      b[r] = hs[pick[r]].offset;
    }
    Eigen::FullPivLU<Mat> lu(a);
    if (lu.isInvertible() && std::fabs(lu.determinant()) > 1e-14) {
      const Vec x = lu.solve(b);
      bool inside = true;
      for (const auto& h : hs) {
        if (h.normal.dot(x) > h.offset + tol * scale * std::max(1.0, h.normal.norm())) {
          inside = false;
          break;
        }
      }
      if (inside) push_unique(x);
    }
    int i = dim - 1;
    while (i >= 0 && pick[i] == m - dim + i) --i;
    if (i < 0) break;
    ++pick[i];
    for (int j = i + 1; j < dim; ++j) pick[j] = pick[j - 1] + 1;
  }
  return out;
}

}  // namespace polylab
