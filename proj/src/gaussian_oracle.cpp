#include "gaussian_oracle.hpp"

#include <cmath>
#include <limits>

#include <boost/math/quadrature/exp_sinh.hpp>

namespace depthlab::detail {

double gaussian_expected_depth(int n) {
  const double half = 0.5 * n;
  const double log_norm = (half - 1.0) * std::log(2.0) + std::lgamma(half);
  const auto f = [&](double r) {
    if (r <= 0.0) return 0.0;
    const double log_chi = (n - 1.0) * std::log(r) - 0.5 * r * r - log_norm;
    return 0.5 * std::erfc(r / std::sqrt(2.0)) * std::exp(log_chi);
  };
  boost::math::quadrature::exp_sinh<double> integrator;
  return integrator.integrate(f, 0.0, std::numeric_limits<double>::infinity());
}

}  // namespace depthlab::detail
