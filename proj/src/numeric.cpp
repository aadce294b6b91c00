#include "depthlab/numeric.hpp"

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/erf.hpp>

namespace depthlab::numeric {

double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol, double* abs_error) {
  if (a == b) {
    if (abs_error) *abs_error = 0.0;
    return 0.0;
  }
  double err = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      f, a, b, 25, rel_tol, &err);
  if (abs_error) *abs_error = err;
  return value;
}

double normal_cdf(double x) { return 0.5 * boost::math::erfc(-x / std::numbers::sqrt2); }

double normal_sf(double x) { return 0.5 * boost::math::erfc(x / std::numbers::sqrt2); }

double log_binomial(double n, double k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

double sphere_area(int n) {
  const double h = 0.5 * n;
  return 2.0 * std::pow(std::numbers::pi, h) / std::tgamma(h);
}

double ball_volume(int n) {
  const double h = 0.5 * n;
  return std::pow(std::numbers::pi, h) / std::tgamma(h + 1.0);
}

double gaussian_abs_moment(double p) {
  return std::pow(2.0, 0.5 * p) * std::tgamma(0.5 * (p + 1.0)) / std::sqrt(std::numbers::pi);
}

double log_sinhc(double u) {
  const double a = std::fabs(u);
  if (a < 1e-4) return a * a / 6.0 - a * a * a * a / 180.0;
  if (a < 20.0) return std::log(std::sinh(a) / a);
  return a + std::log1p(-std::exp(-2.0 * a)) - std::log(2.0 * a);
}

double langevin(double u) {
  const double a = std::fabs(u);
  double value;
  if (a < 1e-4) {
    value = a / 3.0 - a * a * a / 45.0;
  } else {
    value = 1.0 / std::tanh(a) - 1.0 / a;
  }
  return u < 0 ? -value : value;
}

}  // namespace depthlab::numeric

namespace depthlab::numeric {

double ray_extent(const std::function<double(double)>& log_f, double floor) {
  const auto inside = [&](double r) {
    const double v = log_f(r);
    return std::isfinite(v) && v >= floor;
  };
  double lo = 0.0, hi = 1.0;
  while (inside(hi)) {
    lo = hi;
    hi *= 2.0;
    if (hi > 0x1.0p60) return std::numeric_limits<double>::infinity();
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (inside(mid) ? lo : hi) = mid;
  }
  return lo;
}

}  // namespace depthlab::numeric
