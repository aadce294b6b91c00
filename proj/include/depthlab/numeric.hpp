#pragma once

#include <functional>

namespace depthlab::numeric {

/// Adaptive Gauss-Kronrod (15-point) on a finite interval.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = 1e-10, double* abs_error = nullptr);

double normal_cdf(double x);
/// P(Z >= x) for standard normal Z, accurate in the far tail.
double normal_sf(double x);

double log_binomial(double n, double k);

/// Surface area of the unit sphere S^{n-1} and volume of the unit ball B_2^n.
double sphere_area(int n);
double ball_volume(int n);

/// E|g|^p for standard normal g, p > -1.
double gaussian_abs_moment(double p);

/// log(sinh(u)/u), stable for all u.
double log_sinhc(double u);
/// d/du log(sinh(u)/u) = coth(u) - 1/u.
double langevin(double u);

}  // namespace depthlab::numeric

namespace depthlab::numeric {

/// Largest r >= 0 such that log_f stays finite and >= floor on [0, r], by
/// doubling then bisection to relative precision 1e-15. Assumes the set is an
/// interval containing 0 (true for log-concave f). Returns +inf if the
/// doubling passes 2^60.
double ray_extent(const std::function<double(double)>& log_f, double floor);

}  // namespace depthlab::numeric
