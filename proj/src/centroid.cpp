#include "depthlab/centroid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "depthlab/numeric.hpp"

namespace depthlab {

namespace {

constexpr double kUnreliableRelSe = 0.1;

// E|x|^p-type integrals of a one-dimensional density on each half-line.
double half_line_moment(const Measure& m, double p, double sign) {
  const double log_f0 = m.log_density(Vector::Constant(1, 0.0));
  const auto log_f = [&](double r) { return m.log_density(Vector::Constant(1, sign * r)); };
  const double extent = numeric::ray_extent(log_f, log_f0 - 80.0 - 4.0 * p);
  if (!std::isfinite(extent)) throw Error(Errc::kNumericalFailure, "moment: unbounded support scan");
  return numeric::integrate(
      [&](double r) {
        const double l = log_f(r);
        return l == -kInf ? 0.0 : std::pow(r, p) * std::exp(l);
      },
      0.0, extent, 1e-12);
}

}  // namespace

MomentEvaluator::MomentEvaluator(Measure m, std::size_t mc_budget, RngStream rng)
    : measure_(std::move(m)) {
  const auto kind = measure_.kind();
  if (kind == MeasureKind::kGaussianStandard || kind == MeasureKind::kUniformBall) {
    route_ = MomentRoute::kClosedForm;
  } else if (measure_.dimension() == 1 && !measure_.atomic()) {
    route_ = MomentRoute::kQuadrature;
  } else {
    if (!measure_.has_sampler()) {
      throw Error(Errc::kUnsupported, "moments: " + measure_.name() + " needs a sampler");
    }
    route_ = MomentRoute::kMonteCarlo;
    pool_ = std::make_shared<const PointSet>(measure_.sample(rng, std::max<std::size_t>(mc_budget, 2)));
  }
}

MomentValue MomentEvaluator::absolute(const Vector& y, double p) const { return evaluate(y, p, false); }

MomentValue MomentEvaluator::positive(const Vector& y, double p) const { return evaluate(y, p, true); }

MomentValue MomentEvaluator::evaluate(const Vector& y, double p, bool one_sided) const {
  require_dimension(y, dimension(), "moment");
  if (!(p > 0.0)) throw Error(Errc::kInvalidArgument, "moment: order must be positive");
  const double norm = y.norm();
  MomentValue out;
  if (norm == 0.0) return out;
  const double scale = std::pow(norm, p);
  switch (route_) {
    case MomentRoute::kClosedForm: {
      double base;
      if (measure_.kind() == MeasureKind::kGaussianStandard) {
        base = numeric::gaussian_abs_moment(p);
      } else {
        const double n = dimension();
        base = std::exp(std::lgamma(0.5 * n + 1.0) + std::lgamma(0.5 * (p + 1.0)) -
                        0.5 * std::log(std::numbers::pi) - std::lgamma(0.5 * (n + p) + 1.0));
      }
      out.value = scale * (one_sided ? 0.5 * base : base);
      return out;
    }
    case MomentRoute::kQuadrature: {
      const double up = half_line_moment(measure_, p, 1.0);
      const double down = half_line_moment(measure_, p, -1.0);
      const double base = one_sided ? (y[0] > 0 ? up : down) : up + down;
      out.value = scale * base;
      return out;
    }
    case MomentRoute::kMonteCarlo: {
      const Eigen::VectorXd proj = pool_->transpose() * y;
      const auto count = proj.size();
      std::vector<double> values(static_cast<std::size_t>(count));
      for (Eigen::Index j = 0; j < count; ++j) {
        const double a = one_sided ? std::max(proj[j], 0.0) : std::fabs(proj[j]);
        values[static_cast<std::size_t>(j)] = a == 0.0 ? 0.0 : std::pow(a, p);
      }
      const Estimate e = mean_estimate(values.data(), values.size(), 0);
      out.value = e.value;
      out.std_error = e.std_error;
      out.unreliable = !(e.value > 0.0) || e.std_error > kUnreliableRelSe * e.value;
      return out;
    }
  }
  return out;
}

CentroidOracle::CentroidOracle(MomentEvaluator moments, double t, bool one_sided)
    : moments_(std::move(moments)), t_(t), one_sided_(one_sided) {
  if (!(t >= 1.0)) throw Error(Errc::kInvalidArgument, "centroid body: t must be >= 1");
}

SupportValue CentroidOracle::support_with_error(const Vector& y) const {
  const MomentValue m = one_sided_ ? moments_.positive(y, t_) : moments_.absolute(y, t_);
  SupportValue out;
  out.value = m.value > 0.0 ? std::pow(m.value, 1.0 / t_) : 0.0;
  out.std_error = m.value > 0.0 ? out.value * m.std_error / (t_ * m.value) : 0.0;
  out.unreliable = m.unreliable;
  return out;
}

SupportValue zt_support(const CentroidOracle& c, const Vector& y) { return c.support_with_error(y); }

HalvingReport even_halving_check(const MomentEvaluator& moments, double t, const DirectionNet& net,
                                 double rel_tol) {
  if (!moments.measure().traits().even) {
    throw Error(Errc::kNotApplicable, "even_halving_check: measure is not even");
  }
  const CentroidOracle two(moments, t, false);
  const CentroidOracle plus(moments, t, true);
  HalvingReport r;
  r.expected = std::pow(2.0, -1.0 / t);
  r.min_ratio = kInf;
  r.max_ratio = -kInf;
  r.passed = true;
  double worst_excess = -kInf;
  for (const auto& y : net) {
    const SupportValue h = two.support_with_error(y);
    const SupportValue hp = plus.support_with_error(y);
    const double ratio = hp.value / h.value;
    const double rel_se = std::hypot(hp.std_error / hp.value, h.std_error / h.value);
    const double allowed = std::max(rel_tol, 3.0 * rel_se);
    const double dev = std::fabs(ratio / r.expected - 1.0);
    r.min_ratio = std::min(r.min_ratio, ratio);
    r.max_ratio = std::max(r.max_ratio, ratio);
    if (dev - allowed > worst_excess) {
      worst_excess = dev - allowed;
      r.worst_deviation = dev;
      r.allowed_deviation = allowed;
      r.witness = y;
    }
    if (dev > allowed) r.passed = false;
  }
  return r;
}

PlusInclusionReport zt_plus_inclusion_check(const MomentEvaluator& moments, double t, double s,
                                            const DirectionNet& net, double c1, double rel_tol) {
  if (!(t >= 1.0 && s >= t)) throw Error(Errc::kInvalidArgument, "zt_plus_inclusion_check: need 1 <= t <= s");
  const CentroidOracle ht(moments, t, true);
  const CentroidOracle hs(moments, s, true);
  PlusInclusionReport r;
  const double gap = 1.0 / t - 1.0 / s;
  r.left_factor = std::pow(4.0 / std::numbers::e, gap);
  r.right_factor = std::pow(4.0 * (std::numbers::e - 1.0) / std::numbers::e, gap) * s / t;
  r.c1 = c1;
  r.min_left_slack = kInf;
  r.left_ok = true;
  for (const auto& y : net) {
    const SupportValue a = ht.support_with_error(y);
    const SupportValue b = hs.support_with_error(y);
    const double slack = b.value / (r.left_factor * a.value);
    const double tol = std::max(rel_tol, 3.0 * std::hypot(a.std_error / a.value, b.std_error / b.value));
    if (slack < r.min_left_slack) {
      r.min_left_slack = slack;
      r.witness = y;
    }
    if (slack < 1.0 - tol) r.left_ok = false;
    r.c1_required = std::max(r.c1_required, b.value / (r.right_factor * a.value));
  }
  r.right_ok = r.c1_required <= c1;
  r.passed = r.left_ok && r.right_ok;
  return r;
}

PzMomentReport pz_moment_check(const MomentEvaluator& moments, const Vector& xi, double t,
                               double c_emp) {
  if (!(t >= 1.0)) throw Error(Errc::kInvalidArgument, "pz_moment_check: t must be >= 1");
  const MomentValue m1 = moments.positive(xi, t);
  const MomentValue m2 = moments.positive(xi, 2.0 * t);
  PzMomentReport r;
  r.ratio = std::pow(m2.value, 1.0 / (2.0 * t)) / std::pow(m1.value, 1.0 / t);
  r.bound = c_emp;
  r.unreliable = m1.unreliable || m2.unreliable;
  r.passed = r.ratio <= c_emp;
  return r;
}

VolumeRadiusReport zt_volume_radius(const CentroidOracle& c, const VolumeRadiusOptions& options) {
  const int n = c.dimension();
  VolumeRadiusReport r;
  r.bound = options.c_emp * std::sqrt(c.t() / n);
  if (n > 6) return r;
  r.computed = true;
  if (n == 1) {
    r.value = c.support(Vector::Constant(1, 1.0)) + c.support(Vector::Constant(1, -1.0));
  } else {
    std::size_t net_size = options.support_net;
    if (net_size == 0) net_size = n == 2 ? 2048 : (n == 3 ? 4000 : 5000);
    const SupportTable table =
        SupportTable::build(direction_net(n, net_size, options.rng.child(0)),
                            [&](const Vector& y) { return c.support(y); });
    const DirectionNet dirs =
        n == 2 ? direction_net(2, 4096, options.rng)
               : random_directions(n, options.integration_directions, options.rng.child(1));
    std::vector<double> powers;
    powers.reserve(dirs.size());
    for (const auto& xi : dirs) powers.push_back(std::pow(table.radial(xi), n));
    const Estimate e = mean_estimate(powers.data(), powers.size(), options.rng.seed);
    const double factor = numeric::sphere_area(n) / n;
    const double volume = factor * e.value;
    r.value = std::pow(volume, 1.0 / n);
    r.std_error = n == 2 ? 0.0 : r.value * e.std_error / (n * e.value);
  }
  r.passed = r.value <= r.bound;
  return r;
}

}  // namespace depthlab
