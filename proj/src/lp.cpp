#include "depthlab/lp.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace depthlab {

namespace {

struct Phase1 {
  bool optimal = false;
  double objective = 0.0;
  int pivots = 0;
  bool bland = false;
  std::vector<Eigen::Index> basis;
  Vector x_basis;
  Vector duals;
};

// Rows are [V; 1^T] scaled by `sign` so the right-hand side is nonnegative.
// Columns 0..N-1 are structural, N..N+m-1 artificial.
Phase1 run_phase1(const PointSet& v, const Vector& rhs, const Vector& sign, bool bland_only, double price_tol) {
  const Eigen::Index n = v.rows(), count = v.cols(), m = n + 1;
  const auto column = [&](Eigen::Index j) {
    Vector a = Vector::Zero(m);
    if (j < count) {
      a.head(n) = v.col(j);
      a[n] = 1.0;
      a.array() *= sign.array();
    } else {
      a[j - count] = 1.0;
    }
    return a;
  };

  Phase1 p;
  p.bland = bland_only;
  p.basis.resize(static_cast<std::size_t>(m));
  std::vector<char> in_basis(static_cast<std::size_t>(count + m), 0);
  for (Eigen::Index i = 0; i < m; ++i) {
    p.basis[static_cast<std::size_t>(i)] = count + i;
    in_basis[static_cast<std::size_t>(count + i)] = 1;
  }
  Matrix b_inv = Matrix::Identity(m, m);
  p.x_basis = rhs;
  int degenerate_run = 0;
  const int max_pivots = static_cast<int>(50 * m + 2 * std::min<Eigen::Index>(count, 100000)) + 100;
  Vector costs(m);

  for (;;) {
    for (Eigen::Index i = 0; i < m; ++i) costs[i] = p.basis[static_cast<std::size_t>(i)] >= count ? 1.0 : 0.0;
    p.duals = b_inv.transpose() * costs;
    const Vector ys = (p.duals.array() * sign.array()).matrix();
    // Reduced cost of structural column j is -(ys_head . v_j + ys_n).
    const Eigen::VectorXd reduced = -((v.transpose() * ys.head(n)).array() + ys[n]).matrix();

    Eigen::Index entering = -1;
    double best = -price_tol;
    for (Eigen::Index j = 0; j < count + m; ++j) {
      if (in_basis[static_cast<std::size_t>(j)]) continue;
      const double d = j < count ? reduced[j] : 1.0 - p.duals[j - count];
      if (d < best) {
        entering = j;
        if (p.bland) break;
        best = d;
      }
    }
    if (entering < 0) {
      p.optimal = true;
      break;
    }
    if (p.pivots >= max_pivots) break;

    const Vector w = b_inv * column(entering);
    Eigen::Index leave = -1;
    double theta = kInf;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (w[i] <= 1e-11) continue;
      const double ratio = std::max(p.x_basis[i], 0.0) / w[i];
      if (ratio < theta - 1e-14 ||
          (ratio <= theta + 1e-14 && leave >= 0 &&
           p.basis[static_cast<std::size_t>(i)] < p.basis[static_cast<std::size_t>(leave)])) {
        theta = std::min(theta, ratio);
        leave = i;
      }
    }
    if (leave < 0) break;  // unbounded ray: impossible for a bounded phase-1 problem

    degenerate_run = theta <= 1e-14 ? degenerate_run + 1 : 0;
    if (degenerate_run > 2 * m) p.bland = true;

    in_basis[static_cast<std::size_t>(p.basis[static_cast<std::size_t>(leave)])] = 0;
    in_basis[static_cast<std::size_t>(entering)] = 1;
    p.basis[static_cast<std::size_t>(leave)] = entering;
    ++p.pivots;

    Matrix b(m, m);
    for (Eigen::Index i = 0; i < m; ++i) b.col(i) = column(p.basis[static_cast<std::size_t>(i)]);
    b_inv = b.partialPivLu().inverse();
    p.x_basis = b_inv * rhs;
  }
  p.objective = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    if (p.basis[static_cast<std::size_t>(i)] >= count) p.objective += std::max(p.x_basis[i], 0.0);
  }
  return p;
}

}  // namespace

HullLpResult hull_feasibility(const PointSet& vertices, const Vector& x, double tol) {
  const Eigen::Index n = vertices.rows(), count = vertices.cols();
  if (x.size() != n) throw Error(Errc::kDimensionMismatch, "hull_feasibility: point dimension");
  if (count == 0) throw Error(Errc::kInvalidArgument, "hull_feasibility: no vertices");
  if (!x.allFinite() || !vertices.allFinite()) throw Error(Errc::kInvalidArgument, "hull_feasibility: non-finite input");

  Vector rhs(n + 1);
  rhs.head(n) = x;
  rhs[n] = 1.0;
  Vector sign = rhs.unaryExpr([](double b) { return b < 0.0 ? -1.0 : 1.0; });
  const Vector rhs_signed = (rhs.array() * sign.array()).matrix();
  const double scale = 1.0 + std::max(x.lpNorm<Eigen::Infinity>(), vertices.lpNorm<Eigen::Infinity>());

  for (int attempt = 0; attempt < 2; ++attempt) {
    const Phase1 p = run_phase1(vertices, rhs_signed, sign, attempt == 1, 1e-11 * scale);
    if (!p.optimal) continue;
    HullLpResult r;
    r.pivots = p.pivots;
    r.bland = p.bland;
    r.infeasibility = p.objective;
    if (p.objective <= tol * scale) {
      r.weights = Vector::Zero(count);
      for (std::size_t i = 0; i < p.basis.size(); ++i) {
        if (p.basis[i] < count) r.weights[p.basis[i]] = std::max(p.x_basis[static_cast<Eigen::Index>(i)], 0.0);
      }
      const double residual = (vertices * r.weights - x).lpNorm<Eigen::Infinity>();
      const double total = r.weights.sum();
      if (residual <= 1e-7 * scale && std::fabs(total - 1.0) <= 1e-7) {
        r.inside = true;
        return r;
      }
    } else {
      const Vector ys = (p.duals.array() * sign.array()).matrix();
      r.normal = ys.head(n);
      r.offset = ys[n];
      const double at_x = r.normal.dot(x) + r.offset;
      const double at_vertices = ((vertices.transpose() * r.normal).array() + r.offset).maxCoeff();
      if (at_x > at_vertices) {
        r.inside = false;
        return r;
      }
    }
  }
  throw Error(Errc::kNumericalFailure, "hull_feasibility: simplex result failed verification");
}

}  // namespace depthlab
