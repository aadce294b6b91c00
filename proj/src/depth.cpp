#include "depthlab/depth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "depthlab/numeric.hpp"
#include "depthlab/parallel.hpp"

namespace depthlab {

namespace {

double tie_tolerance(double threshold) { return 1e-12 * (1.0 + std::fabs(threshold)); }

// P(X >= x) and P(X <= x) by quadrature of a one-dimensional density.
std::pair<double, double> tails_by_quadrature(const Measure& m, double x) {
  const auto log_f = [&](double y) { return m.log_density(Vector::Constant(1, y)); };
  const double lf0 = log_f(0.0);
  if (!std::isfinite(lf0)) {
    throw Error(Errc::kUnsupported, "depth_1d: density must be positive at 0 for quadrature");
  }
  const double a = numeric::ray_extent([&](double r) { return log_f(-r) - lf0; }, -80.0);
  const double b = numeric::ray_extent([&](double r) { return log_f(r) - lf0; }, -80.0);
  if (!std::isfinite(a) || !std::isfinite(b)) {
    throw Error(Errc::kNumericalFailure, "depth_1d: density does not decay");
  }
  const auto f = [&](double y) {
    const double l = log_f(y);
    return std::isfinite(l) ? std::exp(l - lf0) : 0.0;
  };
  const double total = numeric::integrate(f, -a, b);
  const double c = std::clamp(x, -a, b);
  const double upper = c >= b ? 0.0 : numeric::integrate(f, c, b) / total;
  const double lower = c <= -a ? 0.0 : numeric::integrate(f, -a, c) / total;
  return {std::clamp(upper, 0.0, 1.0), std::clamp(lower, 0.0, 1.0)};
}

}  // namespace

double depth_1d(const Measure& m, double x) {
  if (m.dimension() != 1) throw Error(Errc::kDimensionMismatch, "depth_1d: measure must be one-dimensional");
  const Vector plus = Vector::Constant(1, 1.0), minus = Vector::Constant(1, -1.0);
  if (auto up = m.exact_tail(plus, x)) return std::min(*up, *m.exact_tail(minus, -x));
  if (const CoordinateLaw* c = m.coordinate_law(); c && c->cdf && c->sf) {
    return std::min(c->cdf(x), c->sf(x));
  }
  if (m.atomic()) throw Error(Errc::kUnsupported, "depth_1d: no distribution function for " + m.name());
  const auto [upper, lower] = tails_by_quadrature(m, x);
  return std::min(upper, lower);
}

TailEvaluator::TailEvaluator(Measure m, std::size_t mc_budget, RngStream rng) : measure_(std::move(m)) {
  const Vector probe = Vector::Unit(measure_.dimension(), 0);
  if (!measure_.exact_tail(probe, 0.0)) {
    if (!measure_.has_sampler()) {
      throw Error(Errc::kUnsupported, "tail_mass: " + measure_.name() + " has neither tails nor a sampler");
    }
    pool_ = std::make_shared<const PointSet>(measure_.sample(rng, std::max<std::size_t>(mc_budget, 2)));
  }
}

TailValue TailEvaluator::tail(const Vector& xi, double threshold) const {
  require_dimension(xi, dimension(), "tail_mass");
  const double norm = xi.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) throw Error(Errc::kInvalidArgument, "tail_mass: zero direction");
  const double s = threshold / norm;
  TailValue out;
  if (!pool_) {
    out.value = *measure_.exact_tail(xi / norm, s);
    out.exact = true;
    return out;
  }
  const Eigen::VectorXd w = pool_->transpose() * (xi / norm);
  const double cut = s - tie_tolerance(s);
  const auto hits = static_cast<double>((w.array() >= cut).count());
  const auto count = static_cast<double>(w.size());
  out.value = hits / count;
  out.std_error = std::sqrt(out.value * (1.0 - out.value) / count);
  out.unreliable = hits < 10.0;
  return out;
}

TailValue tail_mass(const TailEvaluator& tails, const Vector& xi, double threshold) {
  return tails.tail(xi, threshold);
}

const char* to_string(DepthKind kind) {
  switch (kind) {
    case DepthKind::kExact: return "exact";
    case DepthKind::kUpperBound: return "upper-bound";
    case DepthKind::kInterval: return "interval";
  }
  return "unknown";
}

DepthEstimator::DepthEstimator(Measure m, const DepthOptions& options, RngStream rng)
    : tails_(m, options.mc_budget, rng.child(0)), options_(options) {
  const int n = tails_.dimension();
  if (n == 1 || (tails_.exact() && m.traits().spherically_symmetric)) return;
  net_ = direction_net(n, std::max<std::size_t>(options_.net_size, 2), rng.child(1));
  if (const PointSet* pool = tails_.pool()) {
    auto rows = std::make_shared<std::vector<std::vector<double>>>(net_.size());
    parallel_for(net_.size(), [&](std::size_t j) {
      const Eigen::VectorXd w = pool->transpose() * net_[j];
      (*rows)[j].assign(w.data(), w.data() + w.size());
      std::sort((*rows)[j].begin(), (*rows)[j].end());
    });
    sorted_ = std::move(rows);
  }
}

DepthEstimate DepthEstimator::estimate(const Vector& x, const std::vector<Vector>& hints,
                                       RngStream walk) const {
  const int n = tails_.dimension();
  require_dimension(x, n, "depth_estimate");
  DepthEstimate out;
  out.point = x;
  const Measure& m = tails_.measure();

  if (n == 1) {
    const Vector plus = Vector::Constant(1, 1.0), minus = Vector::Constant(1, -1.0);
    const TailValue up = tails_.tail(plus, x[0]);
    const TailValue down = tails_.tail(minus, -x[0]);
    const bool take_up = up.value <= down.value;
    out.value = take_up ? up.value : down.value;
    out.std_error = take_up ? up.std_error : down.std_error;
    out.best_direction = take_up ? plus : minus;
    out.kind = tails_.exact() ? DepthKind::kExact : DepthKind::kUpperBound;
    out.tail_evaluations = 2;
    return out;
  }

  const double r = x.norm();
  if (tails_.exact() && m.traits().spherically_symmetric) {
    out.best_direction = r > 0.0 ? Vector(x / r) : Vector(Vector::Unit(n, 0));
    out.value = tails_.tail(out.best_direction, r).value;
    out.kind = DepthKind::kExact;
    out.tail_evaluations = 1;
    return out;
  }

  double best = kInf;
  const auto consider = [&](const Vector& dir, const TailValue& tv) {
    ++out.tail_evaluations;
    if (tv.value < best) {
      best = tv.value;
      out.value = tv.value;
      out.std_error = tv.std_error;
      out.best_direction = dir;
    }
  };
  const auto full = [&](const Vector& dir) { consider(dir, tails_.tail(dir, x.dot(dir))); };

  for (const auto& h : hints) {
    const double hn = h.norm();
    if (hn > 0.0 && std::isfinite(hn)) full(h / hn);
  }
  if (r > 0.0) full(x / r);
  for (std::size_t j = 0; j < net_.size(); ++j) {
    if (sorted_) {
      const auto& row = (*sorted_)[j];
      const double s = x.dot(net_[j]);
      const auto it = std::lower_bound(row.begin(), row.end(), s - tie_tolerance(s));
      const auto count = static_cast<double>(row.size());
      TailValue tv;
      tv.value = static_cast<double>(row.end() - it) / count;
      tv.std_error = std::sqrt(tv.value * (1.0 - tv.value) / count);
      consider(net_[j], tv);
    } else {
      full(net_[j]);
    }
  }

  Rng rng(walk);
  double step = 0.5;
  for (int it = 0; it < options_.refine_iters && best > 0.0; ++it) {
    Vector z = rng.normal_vector(n);
    z -= z.dot(out.best_direction) * out.best_direction;
    const double zn = z.norm();
    if (!(zn > 0.0)) continue;
    Vector proposal = out.best_direction + step * z / zn;
    proposal.normalize();
    const double before = best;
    full(proposal);
    step = best < before ? std::min(1.0, step * 1.5) : std::max(1e-4, step * 0.7);
  }
  out.kind = DepthKind::kUpperBound;
  return out;
}

DepthEstimate depth_estimate(const DepthEstimator& estimator, const Vector& x, const std::vector<Vector>& hints) {
  return estimator.estimate(x, hints);
}

DepthEstimate depth_estimate(const Measure& m, const Vector& x, const DepthOptions& options, RngStream rng) {
  return DepthEstimator(m, options, rng).estimate(x);
}

CramerDepthBound depth_upper_cramer(const LaplaceOracle& oracle, const Vector& x, const CramerOptions& options) {
  if (!oracle.measure().traits().centered) {
    throw Error(Errc::kNotApplicable, "depth_upper_cramer: measure must be centered");
  }
  CramerDepthBound out;
  out.cramer = cramer(oracle, x, options);
  out.value = out.cramer.infinite ? 0.0 : std::exp(-out.cramer.value);
  return out;
}

PzLowerBound depth_lower_pz(const CentroidOracle& plus, const Vector& x, double delta, const DirectionNet& net) {
  if (!plus.one_sided()) throw Error(Errc::kInvalidArgument, "depth_lower_pz: needs the one-sided body Z_t^+");
  if (!(delta > 0.0 && delta < 1.0)) throw Error(Errc::kInvalidArgument, "depth_lower_pz: delta must lie in (0, 1)");
  if (net.empty()) throw Error(Errc::kInvalidArgument, "depth_lower_pz: empty net");
  require_dimension(x, plus.dimension(), "depth_lower_pz");
  PzLowerBound out;
  out.delta = delta;
  out.gauge = x.isZero(0.0) ? 0.0 : gauge_from_support([&](const Vector& y) { return plus.support(y); }, x, net);
  if (out.gauge > delta) {
    throw Error(Errc::kNotApplicable, "depth_lower_pz: x lies outside delta Z_t^+ (gauge " +
                                          std::to_string(out.gauge) + ")");
  }
  const double t = plus.t();
  const MomentEvaluator& moments = plus.moments();
  double worst = kInf;
  for (const auto& xi : net) {
    const MomentValue g1 = moments.positive(xi, t);
    const MomentValue g2 = moments.positive(xi, 2.0 * t);
    out.unreliable = out.unreliable || g1.unreliable || g2.unreliable;
    const double ratio = g2.value > 0.0 ? g1.value * g1.value / g2.value : 0.0;
    if (ratio < worst) {
      worst = ratio;
      out.worst_direction = xi;
    }
  }
  const double shrink = 1.0 - std::pow(delta, t);
  out.value = shrink * shrink * worst;
  return out;
}

GrunbaumReport grunbaum_check(const TailEvaluator& tails, const DirectionNet& net, double tolerance) {
  if (!tails.measure().traits().centered) {
    throw Error(Errc::kNotApplicable, "grunbaum_check: measure must be centered");
  }
  GrunbaumReport r;
  r.bound = 1.0 / std::numbers::e - tolerance;
  r.directions = net.size();
  r.min_tail = kInf;
  for (const auto& xi : net) {
    const double v = tails.tail(xi, 0.0).value;
    if (v < r.min_tail) {
      r.min_tail = v;
      r.witness = xi;
    }
  }
  r.passed = r.min_tail >= r.bound;
  return r;
}

Estimate expected_depth(const DepthEstimator& estimator, RngStream rng, std::size_t samples) {
  if (samples < 2) throw Error(Errc::kInvalidArgument, "expected_depth: needs at least two samples");
  const Measure& m = estimator.measure();
  std::vector<double> values(samples);
  std::vector<char> exact(samples, 0);
  parallel_for(samples, [&](std::size_t i) {
    Rng draw(rng.child(1).child(i));
    const Vector x = m.draw(draw);
    const DepthEstimate d = estimator.estimate(x, {}, rng.child(2).child(i));
    values[i] = d.value;
    exact[i] = d.kind == DepthKind::kExact;
  });
  Estimate e = mean_estimate(values.data(), samples, rng.seed);
  e.unreliable = std::find(exact.begin(), exact.end(), 0) != exact.end() && !estimator.tails().exact() &&
                 e.value * static_cast<double>(estimator.options().mc_budget) < 10.0;
  return e;
}

Estimate expected_depth(const Measure& m, RngStream rng, std::size_t samples, const DepthOptions& options) {
  return expected_depth(DepthEstimator(m, options, rng.child(0)), rng, samples);
}

}  // namespace depthlab
