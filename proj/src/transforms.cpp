#include "depthlab/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <mutex>
#include <numbers>
#include <string>
#include <unordered_map>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/sinh_sinh.hpp>

#include "depthlab/numeric.hpp"

namespace depthlab {

const char* to_string(LaplaceMode mode) {
  switch (mode) {
    case LaplaceMode::kAuto: return "auto";
    case LaplaceMode::kAnalytic: return "analytic";
    case LaplaceMode::kQuadrature1D: return "quadrature-1d";
    case LaplaceMode::kMonteCarlo: return "monte-carlo";
  }
  return "unknown";
}

namespace {

constexpr std::size_t kCacheCapacity = 1 << 14;

// Integral of g over the support of a coordinate law, split at 0.
double integrate_coordinate(const CoordinateLaw& c, const std::function<double(double)>& g) {
  const double lo = c.support_lo, hi = c.support_hi;
  if (std::isfinite(lo) && std::isfinite(hi)) return numeric::integrate(g, lo, hi, 1e-13);
  if (std::isfinite(lo)) {
    boost::math::quadrature::exp_sinh<double> integrator;
    return integrator.integrate(g, lo, std::numeric_limits<double>::infinity());
  }
  if (std::isfinite(hi)) {
    boost::math::quadrature::exp_sinh<double> integrator;
    return integrator.integrate(g, -std::numeric_limits<double>::infinity(), hi);
  }
  boost::math::quadrature::sinh_sinh<double> integrator;
  return integrator.integrate(g);
}

// log E e^{uX} and its derivative for one coordinate, by quadrature.
double coordinate_log_mgf(const CoordinateLaw& c, double u, double* derivative) {
  if (u <= c.mgf_lo || u >= c.mgf_hi) return kInf;
  double ref = 0.0;
  if (u > 0 && std::isfinite(c.support_hi)) ref = c.support_hi;
  if (u < 0 && std::isfinite(c.support_lo)) ref = c.support_lo;
  const auto weight = [&](double x) {
    const double f = c.density(x);
    return f == 0.0 ? 0.0 : std::exp(u * (x - ref)) * f;
  };
  const double z = integrate_coordinate(c, weight);
  if (derivative) {
    const double m1 = integrate_coordinate(c, [&](double x) { return x * weight(x); });
    *derivative = m1 / z;
  }
  return u * ref + std::log(z);
}

}  // namespace

struct LaplaceOracle::State {
  std::mutex mutex;
  std::unordered_map<std::string, std::pair<double, double>> cache;
  PointSet pool;
};

LaplaceOracle::LaplaceOracle(Measure m, LaplaceMode mode, std::size_t mc_budget, RngStream rng)
    : measure_(std::move(m)), mode_(mode), state_(std::make_shared<State>()) {
  if (measure_.atomic()) {
    throw Error(Errc::kUndefinedForAtomic, "Laplace transform: " + measure_.name() + " is atomic");
  }
  if (mode_ == LaplaceMode::kAuto) {
    if (measure_.has_analytic_log_mgf()) {
      mode_ = LaplaceMode::kAnalytic;
    } else if (measure_.traits().product && measure_.coordinate_law() &&
               measure_.coordinate_law()->density) {
      mode_ = LaplaceMode::kQuadrature1D;
    } else {
      mode_ = LaplaceMode::kMonteCarlo;
    }
  }
  if (mode_ == LaplaceMode::kAnalytic && !measure_.has_analytic_log_mgf()) {
    throw Error(Errc::kUnsupported, "Laplace transform: no closed form for " + measure_.name());
  }
  if (mode_ == LaplaceMode::kQuadrature1D &&
      !(measure_.traits().product && measure_.coordinate_law() && measure_.coordinate_law()->density)) {
    throw Error(Errc::kUnsupported, "Laplace transform: quadrature needs a product measure");
  }
  if (mode_ == LaplaceMode::kMonteCarlo) {
    state_->pool = measure_.sample(rng, std::max<std::size_t>(mc_budget, 2));
  }
}

double LaplaceOracle::log_mgf(const Vector& u) const { return log_mgf_with_error(u).value; }

LaplaceValue LaplaceOracle::log_mgf_with_error(const Vector& u) const {
  require_dimension(u, dimension(), "log_mgf");
  if (!u.allFinite()) throw Error(Errc::kInvalidArgument, "log_mgf: u must be finite");
  std::string key(reinterpret_cast<const char*>(u.data()), sizeof(double) * static_cast<std::size_t>(u.size()));
  {
    std::lock_guard lock(state_->mutex);
    if (auto it = state_->cache.find(key); it != state_->cache.end()) {
      LaplaceValue out{it->second.first, it->second.second, false};
      out.unreliable = mode_ == LaplaceMode::kMonteCarlo && out.std_error > 0.1;
      return out;
    }
  }
  double se = 0.0;
  const double value = u.isZero(0.0) ? 0.0 : evaluate(u, &se);
  {
    std::lock_guard lock(state_->mutex);
    if (state_->cache.size() >= kCacheCapacity) state_->cache.clear();
    state_->cache.emplace(std::move(key), std::make_pair(value, se));
  }
  LaplaceValue out{value, se, false};
  // se is the relative standard error of the moment generating function.
  out.unreliable = mode_ == LaplaceMode::kMonteCarlo && se > 0.1;
  return out;
}

double LaplaceOracle::evaluate(const Vector& u, double* std_error) const {
  *std_error = 0.0;
  switch (mode_) {
    case LaplaceMode::kAnalytic:
      return measure_.analytic_log_mgf(u);
    case LaplaceMode::kQuadrature1D: {
      const CoordinateLaw& c = *measure_.coordinate_law();
      double total = 0.0;
      for (Eigen::Index i = 0; i < u.size(); ++i) {
        const double l = coordinate_log_mgf(c, u[i], nullptr);
        if (!std::isfinite(l)) return kInf;
        total += l;
      }
      return total;
    }
    case LaplaceMode::kMonteCarlo:
    case LaplaceMode::kAuto: {
      const Eigen::VectorXd w = state_->pool.transpose() * u;
      const double top = w.maxCoeff();
      const Eigen::ArrayXd e = (w.array() - top).exp();
      const double mean = e.mean();
      const auto count = static_cast<double>(e.size());
      const double var = (e - mean).square().sum() / (count - 1.0);
      *std_error = std::sqrt(var / count) / mean;
      return top + std::log(mean);
    }
  }
  return kNaN;
}

Vector LaplaceOracle::gradient(const Vector& u) const {
  require_dimension(u, dimension(), "gradient");
  return evaluate_gradient(u);
}

Vector LaplaceOracle::evaluate_gradient(const Vector& u) const {
  const auto n = u.size();
  switch (mode_) {
    case LaplaceMode::kAnalytic: {
      if (auto g = measure_.analytic_log_mgf_gradient(u)) return *g;
      Vector g(n);
      for (Eigen::Index i = 0; i < n; ++i) {
        const double h = 1e-6 * std::max(1.0, std::fabs(u[i]));
        Vector up = u, dn = u;
        up[i] += h;
        dn[i] -= h;
        const double fu = log_mgf(up), fd = log_mgf(dn), f0 = log_mgf(u);
        if (std::isfinite(fu) && std::isfinite(fd)) {
          g[i] = (fu - fd) / (2.0 * h);
        } else if (std::isfinite(fd)) {
          g[i] = (f0 - fd) / h;
        } else {
          g[i] = (fu - f0) / h;
        }
      }
      return g;
    }
    case LaplaceMode::kQuadrature1D: {
      const CoordinateLaw& c = *measure_.coordinate_law();
      Vector g(n);
      for (Eigen::Index i = 0; i < n; ++i) coordinate_log_mgf(c, u[i], &g[i]);
      return g;
    }
    case LaplaceMode::kMonteCarlo:
    case LaplaceMode::kAuto: {
      const Eigen::VectorXd w = state_->pool.transpose() * u;
      const double top = w.maxCoeff();
      const Eigen::VectorXd e = (w.array() - top).exp().matrix();
      return state_->pool * e / e.sum();
    }
  }
  return Vector::Constant(n, kNaN);
}

CramerValue cramer(const LaplaceOracle& oracle, const Vector& v, const CramerOptions& options) {
  const int n = oracle.dimension();
  require_dimension(v, n, "cramer");
  if (!(options.tol > 0.0)) throw Error(Errc::kInvalidArgument, "cramer: tol must be positive");
  CramerValue out;
  out.point = v;

  Vector u = Vector::Zero(n);
  if (options.start && options.start->size() == n && std::isfinite(oracle.log_mgf(*options.start))) {
    u = *options.start;
  }
  const auto objective = [&](const Vector& w) {
    const double lam = oracle.log_mgf(w);
    return std::isfinite(lam) ? v.dot(w) - lam : -kInf;
  };
  double f = objective(u);
  Vector g = v - oracle.gradient(u);
  Matrix h_inv = Matrix::Identity(n, n);

  int it = 0;
  for (; it < options.max_iterations; ++it) {
    if (g.lpNorm<Eigen::Infinity>() <= options.tol) {
      out.converged = true;
      break;
    }
    Vector d = h_inv * g;
    if (!(d.dot(g) > 0.0)) {
      h_inv.setIdentity();
      d = g;
    }
    const double slope = g.dot(d);
    double alpha = 1.0;
    double f_new = -kInf;
    bool accepted = false;
    for (int k = 0; k < 80; ++k) {
      f_new = objective(u + alpha * d);
      if (f_new >= f + 1e-4 * alpha * slope) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) break;
    if (alpha == 1.0) {
      // The domain may be far away (or absent): grow the step while it pays.
      for (int k = 0; k < 60; ++k) {
        const double f_try = objective(u + 2.0 * alpha * d);
        if (!(f_try > f_new && f_try >= f + 1e-4 * 2.0 * alpha * slope)) break;
        alpha *= 2.0;
        f_new = f_try;
      }
    }
    const Vector s = alpha * d;
    u += s;
    f = f_new;
    const Vector g_new = v - oracle.gradient(u);
    const Vector y = g - g_new;
    const double sy = s.dot(y);
    if (sy > 1e-300) {
      const double rho = 1.0 / sy;
      const Matrix left = Matrix::Identity(n, n) - rho * s * y.transpose();
      h_inv = left * h_inv * left.transpose() + rho * s * s.transpose();
    }
    g = g_new;
    if (u.norm() > options.divergence_radius) {
      // Unbounded growth, unless the supremum is only approached at infinity
      // (v on the boundary of an atomic support).
      out.infinite = !(f - objective(0.5 * u) <= 1e-9 * (1.0 + std::fabs(f)));
      out.converged = true;
      break;
    }
    if (s.norm() < 1e-14 * (1.0 + u.norm())) {
      out.converged = g.lpNorm<Eigen::Infinity>() <= std::sqrt(options.tol);
      break;
    }
  }
  out.iterations = it;
  out.maximizer = u;
  if (out.infinite) {
    out.value = kInf;
    out.certificate = u / u.norm();
    out.converged = true;
  } else {
    out.value = std::max(v.dot(u) - oracle.log_mgf(u), 0.0);
  }
  return out;
}

RadialValue bt_radial(const LaplaceOracle& oracle, const Vector& xi, double t, double rel_tol) {
  require_dimension(xi, oracle.dimension(), "bt_radial");
  if (!(t > 0.0)) throw Error(Errc::kInvalidArgument, "bt_radial: t must be positive");
  RadialValue out;
  CramerOptions opts;
  std::optional<Vector> warm;
  const auto level = [&](double r) {
    opts.start = warm;
    const CramerValue c = cramer(oracle, r * xi, opts);
    ++out.evaluations;
    if (!c.infinite) warm = c.maximizer;
    return c.value;
  };
  double lo = 0.0, hi = 1.0;
  while (level(hi) <= t) {
    lo = hi;
    hi *= 2.0;
    if (hi > 0x1.0p60) {
      out.radius = kInf;
      out.unbounded = true;
      return out;
    }
  }
  for (int it = 0; it < 400 && hi - lo > rel_tol * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (level(mid) <= t ? lo : hi) = mid;
  }
  out.radius = 0.5 * (lo + hi);
  return out;
}

NestingReport bt_nesting_check(const LaplaceOracle& oracle, const Vector& xi, double t, double s,
                               double rel_tol) {
  if (!(t > 0.0 && t <= s)) throw Error(Errc::kInvalidArgument, "bt_nesting_check: need 0 < t <= s");
  NestingReport r;
  const RadialValue a = bt_radial(oracle, xi, t);
  const RadialValue b = bt_radial(oracle, xi, s);
  r.rho_t = a.radius;
  r.rho_s = b.radius;
  if (a.unbounded || b.unbounded) {
    r.left_ok = b.unbounded;
    r.right_ok = a.unbounded || !b.unbounded;
  } else {
    r.left_ok = a.radius <= b.radius * (1.0 + rel_tol);
    r.right_ok = b.radius <= (s / t) * a.radius * (1.0 + rel_tol);
  }
  r.passed = r.left_ok && r.right_ok;
  return r;
}

bool mt_membership(const MomentEvaluator& moments, const Vector& v, double t) {
  return moments.absolute(v, t).value <= 1.0;
}

RegularityReport regularity_ratio(const MomentEvaluator& moments, const Vector& y, double s, double t,
                                  double c_emp) {
  if (!(t >= 2.0 && s >= t)) throw Error(Errc::kInvalidArgument, "regularity_ratio: need s >= t >= 2");
  RegularityReport r;
  const double hs = std::pow(moments.absolute(y, s).value, 1.0 / s);
  const double ht = std::pow(moments.absolute(y, t).value, 1.0 / t);
  r.ratio = s == t ? 1.0 : hs / ht;
  r.bound = c_emp * s / t;
  r.passed = r.ratio <= r.bound;
  return r;
}

double measure_alpha(const MomentEvaluator& moments, const DirectionNet& directions,
                     const std::vector<double>& orders) {
  double alpha = 1.0;
  for (const auto& y : directions) {
    std::vector<double> norms;
    norms.reserve(orders.size());
    for (double p : orders) norms.push_back(std::pow(moments.absolute(y, p).value, 1.0 / p));
    for (std::size_t i = 0; i < orders.size(); ++i) {
      for (std::size_t j = 0; j < orders.size(); ++j) {
        const double t = orders[i], s = orders[j];
        if (t >= 2.0 && s > t) alpha = std::max(alpha, norms[j] / norms[i] * t / s);
      }
    }
  }
  return alpha;
}

BtInZtReport bt_in_zt_check(const LaplaceOracle& oracle, const CentroidOracle& zt,
                            const DirectionNet& directions, const DirectionNet& support_net,
                            double alpha) {
  if (zt.one_sided()) throw Error(Errc::kInvalidArgument, "bt_in_zt_check: needs the two-sided body");
  if (!(zt.t() >= 2.0)) throw Error(Errc::kInvalidArgument, "bt_in_zt_check: t must be >= 2");
  const SupportTable table =
      SupportTable::build(support_net, [&](const Vector& y) { return zt.support(y); });
  BtInZtReport r;
  r.alpha = alpha;
  r.bound = 4.0 * std::numbers::e * alpha;
  r.directions = directions.size();
  for (const auto& xi : directions) {
    const RadialValue rho = bt_radial(oracle, xi, zt.t());
    double gauge;
    if (rho.unbounded) {
      ++r.unbounded;
      gauge = kInf;
    } else {
      gauge = table.gauge(rho.radius * xi);
    }
    if (gauge > r.max_gauge || r.witness.size() == 0) {
      r.max_gauge = std::max(r.max_gauge, gauge);
      if (gauge >= r.max_gauge) r.witness = xi;
    }
  }
  r.passed = r.max_gauge <= r.bound;
  return r;
}

}  // namespace depthlab
