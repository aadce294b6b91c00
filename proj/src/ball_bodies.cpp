#include "depthlab/ball_bodies.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "depthlab/centroid.hpp"
#include "depthlab/numeric.hpp"
#include "depthlab/parallel.hpp"

namespace depthlab {

namespace {

double origin_log_density(const Measure& m) {
  const double v = m.log_density(Vector::Zero(m.dimension()));
  if (!std::isfinite(v)) {
    throw Error(Errc::kNotApplicable, "density of " + m.name() + " vanishes at the origin");
  }
  return v;
}

}  // namespace

BallBodyOracle::BallBodyOracle(Measure m, double t, double log_drop, double rel_tol)
    : measure_(std::move(m)), t_(t), log_drop_(log_drop), rel_tol_(rel_tol) {
  if (!(t_ > 0.0)) throw Error(Errc::kInvalidArgument, "BallBodyOracle: t must be positive");
  if (!(log_drop_ > 0.0)) throw Error(Errc::kInvalidArgument, "BallBodyOracle: log_drop must be positive");
  log_f0_ = origin_log_density(measure_);
}

double BallBodyOracle::radial(const Vector& x) const {
  require_dimension(x, dimension(), "kt_radial");
  const double scale = x.norm();
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw Error(Errc::kInvalidArgument, "kt_radial: direction must be nonzero and finite");
  }
  const Vector xi = x / scale;
  const auto log_ratio = [&](double r) { return measure_.log_density(r * xi) - log_f0_; };
  // The t-th moment weight shifts mass outward, so the cutoff deepens with t.
  const double extent = numeric::ray_extent(log_ratio, -(log_drop_ + 4.0 * t_));
  if (!std::isfinite(extent)) {
    throw Error(Errc::kNumericalFailure, "kt_radial: density does not decay along the ray");
  }
  double integral;
  if (t_ >= 1.0) {
    integral = numeric::integrate(
        [&](double r) {
          const double l = log_ratio(r);
          return std::isfinite(l) ? t_ * std::pow(r, t_ - 1.0) * std::exp(l) : 0.0;
        },
        0.0, extent, rel_tol_);
  } else {
    // s = r^t removes the singularity of r^{t-1} at the origin.
    integral = numeric::integrate(
        [&](double s) {
          const double l = log_ratio(std::pow(s, 1.0 / t_));
          return std::isfinite(l) ? std::exp(l) : 0.0;
        },
        0.0, std::pow(extent, t_), rel_tol_);
  }
  return std::pow(integral, 1.0 / t_) / scale;
}

double kt_radial(const BallBodyOracle& b, const Vector& xi) { return b.radial(xi); }

KtInclusionReport kt_inclusion_check(const Measure& m, double t, double s, const DirectionNet& net,
                                     double rel_tol) {
  if (!(t > 0.0 && t <= s)) throw Error(Errc::kInvalidArgument, "kt_inclusion_check: need 0 < t <= s");
  if (!m.traits().centered) throw Error(Errc::kNotApplicable, "kt_inclusion_check: measure must be centered");
  const int n = m.dimension();
  const BallBodyOracle kt(m, t), ks(m, s);
  KtInclusionReport r;
  r.left_factor = std::exp(std::lgamma(t + 1.0) / t - std::lgamma(s + 1.0) / s);
  r.right_factor = std::exp(n / t - n / s);
  r.directions = net.size();
  std::vector<double> left(net.size()), right(net.size());
  parallel_for(net.size(), [&](std::size_t i) {
    const double rt = kt.radial(net[i]);
    const double rs = ks.radial(net[i]);
    left[i] = rt / (r.left_factor * rs);
    right[i] = r.right_factor * rs / rt;
  });
  r.min_left_slack = kInf;
  r.min_right_slack = kInf;
  double worst = kInf;
  for (std::size_t i = 0; i < net.size(); ++i) {
    r.min_left_slack = std::min(r.min_left_slack, left[i]);
    r.min_right_slack = std::min(r.min_right_slack, right[i]);
    if (std::min(left[i], right[i]) < worst) {
      worst = std::min(left[i], right[i]);
      r.witness = net[i];
    }
  }
  r.passed = r.min_left_slack >= 1.0 - rel_tol && r.min_right_slack >= 1.0 - rel_tol;
  return r;
}

double polar_volume(int n, const std::function<double(const Vector&)>& radial, std::size_t directions,
                    RngStream rng) {
  const DirectionNet net = direction_net(n, directions, rng);
  std::vector<double> powers(net.size());
  parallel_for(net.size(), [&](std::size_t i) { powers[i] = std::pow(radial(net[i]), n); });
  const double mean = pairwise_sum(powers.data(), powers.size()) / static_cast<double>(powers.size());
  return numeric::sphere_area(n) / n * mean;
}

VolumeIdentityReport volume_identity_check(const Measure& m, const VolumeIdentityOptions& options) {
  const int n = m.dimension();
  if (n > 4) throw Error(Errc::kUnsupported, "volume_identity_check: dimension above 4");
  std::size_t directions = options.directions;
  if (directions == 0) {
    directions = n == 1 ? 2 : n == 2 ? 4096 : n == 3 ? 10000 : 100000;
  }
  const BallBodyOracle kn(m, n), kn1(m, n + 1);
  const double f0 = std::exp(kn.log_density_at_origin());
  VolumeIdentityReport r;
  r.directions = directions;
  r.kn_volume_f0 = f0 * polar_volume(n, [&](const Vector& x) { return kn.radial(x); }, directions, options.rng);
  r.kn1_volume_f0 = f0 * polar_volume(n, [&](const Vector& x) { return kn1.radial(x); }, directions, options.rng);
  r.kn1_scaled = std::pow(r.kn1_volume_f0, (n + 1.0) / n);
  r.band_lo = options.band_lo;
  r.band_hi = options.band_hi > 0.0 ? options.band_hi : std::numbers::e * (n + 1.0) / n;
  r.kn_ok = std::fabs(r.kn_volume_f0 - 1.0) <= options.kn_tolerance;
  r.kn1_ok = r.kn1_scaled >= r.band_lo && r.kn1_scaled <= r.band_hi;
  r.passed = r.kn_ok && r.kn1_ok;
  return r;
}

RtOracle::RtOracle(Measure m, double t) : measure_(std::move(m)), t_(t) {
  if (!(t_ > 0.0)) throw Error(Errc::kInvalidArgument, "RtOracle: t must be positive");
  log_f0_ = origin_log_density(measure_);
}

bool RtOracle::contains(const Vector& x) const {
  require_dimension(x, measure_.dimension(), "rt_membership");
  return measure_.log_density(x) >= log_f0_ - t_;
}

double RtOracle::radial(const Vector& xi) const {
  require_dimension(xi, measure_.dimension(), "rt_radial");
  const double scale = xi.norm();
  if (!(scale > 0.0)) throw Error(Errc::kInvalidArgument, "rt_radial: direction must be nonzero");
  const Vector u = xi / scale;
  return numeric::ray_extent([&](double r) { return measure_.log_density(r * u) - log_f0_; }, -t_) / scale;
}

bool rt_membership(const RtOracle& r, const Vector& x) { return r.contains(x); }

RtContainsReport rt_contains_kn1_check(const Measure& m, double t, const DirectionNet& directions,
                                       const RtContainsOptions& options) {
  const int n = m.dimension();
  if (!(t >= 5.0 * n)) throw Error(Errc::kInvalidArgument, "rt_contains_kn1_check: needs t >= 5n");
  const RtOracle rt(m, t);
  const BallBodyOracle kn1(m, n + 1);
  const CentroidOracle zplus(MomentEvaluator(m, options.mc_budget, options.rng), t, true);
  const SupportTable table = SupportTable::build(direction_net(n, options.support_net, options.rng.child(1)),
                                                 [&](const Vector& y) { return zplus.support(y); });
  std::vector<double> a(directions.size()), b(directions.size());
  parallel_for(directions.size(), [&](std::size_t i) {
    const double k = kn1.radial(directions[i]);
    a[i] = rt.radial(directions[i]) / k;
    b[i] = table.radial(directions[i]) / k;
  });
  RtContainsReport r;
  r.floor = options.floor;
  r.directions = directions.size();
  r.c0 = kInf;
  r.c0_prime = kInf;
  double worst = kInf;
  for (std::size_t i = 0; i < directions.size(); ++i) {
    r.c0 = std::min(r.c0, a[i]);
    r.c0_prime = std::min(r.c0_prime, b[i]);
    if (std::min(a[i], b[i]) < worst) {
      worst = std::min(a[i], b[i]);
      r.witness = directions[i];
    }
  }
  r.passed = r.c0 >= r.floor && r.c0_prime >= r.floor;
  return r;
}

}  // namespace depthlab
