#pragma once

#include <cstddef>
#include <functional>

#include "depthlab/core.hpp"
#include "depthlab/measure.hpp"
#include "depthlab/sphere.hpp"

namespace depthlab {

/// Ball's body K_t of a measure with density, through its radial function
///   rho(x) = ((1/f(0)) int_0^inf t r^{t-1} f(r x) dr)^{1/t}.
class BallBodyOracle {
 public:
  /// `log_drop`: the ray integral stops where log f falls this far below log f(0).
  BallBodyOracle(Measure m, double t, double log_drop = 80.0, double rel_tol = 1e-12);

  double radial(const Vector& x) const;

  double t() const { return t_; }
  const Measure& measure() const { return measure_; }
  int dimension() const { return measure_.dimension(); }
  double log_density_at_origin() const { return log_f0_; }

 private:
  Measure measure_;
  double t_;
  double log_drop_;
  double rel_tol_;
  double log_f0_;
};

double kt_radial(const BallBodyOracle& b, const Vector& xi);

struct KtInclusionReport {
  double left_factor = 0.0;   // Gamma(t+1)^{1/t} / Gamma(s+1)^{1/s}
  double right_factor = 0.0;  // e^{n/t - n/s}
  double min_left_slack = 0.0;   // min rho_t / (left_factor rho_s)
  double min_right_slack = 0.0;  // min right_factor rho_s / rho_t
  std::size_t directions = 0;
  Vector witness;
  bool passed = false;
};

KtInclusionReport kt_inclusion_check(const Measure& m, double t, double s, const DirectionNet& net,
                                     double rel_tol = 1e-9);

struct VolumeIdentityReport {
  double kn_volume_f0 = 0.0;   // |K_n| f(0), ideally 1
  double kn1_volume_f0 = 0.0;  // |K_{n+1}| f(0)
  double kn1_scaled = 0.0;     // (f(0)|K_{n+1}|)^{(n+1)/n}
  double band_lo = 0.0;
  double band_hi = 0.0;
  std::size_t directions = 0;
  bool kn_ok = false;
  bool kn1_ok = false;
  bool passed = false;
};

struct VolumeIdentityOptions {
  double kn_tolerance = 0.02;
  double band_lo = 0.36787944117144233;  // 1/e
  double band_hi = 0.0;                  // 0: e (n+1)/n
  std::size_t directions = 0;            // 0: size chosen by dimension
  RngStream rng{0x7e1, 0};
};

/// |K_n| and |K_{n+1}| by polar integration. Dimensions 1 to 4.
VolumeIdentityReport volume_identity_check(const Measure& m, const VolumeIdentityOptions& options = {});

/// Volume of a star body from its radial function by polar integration over
/// an equal-weight direction net. Exact two-point rule in dimension 1.
double polar_volume(int n, const std::function<double(const Vector&)>& radial, std::size_t directions,
                    RngStream rng);

/// Superlevel set R_t = {f >= e^{-t} f(0)}.
class RtOracle {
 public:
  RtOracle(Measure m, double t);

  bool contains(const Vector& x) const;
  /// Boundary distance along xi (bisection on the log-density); may be +inf
  /// only for measures with unbounded flat regions.
  double radial(const Vector& xi) const;

  double t() const { return t_; }
  const Measure& measure() const { return measure_; }

 private:
  Measure measure_;
  double t_;
  double log_f0_;
};

bool rt_membership(const RtOracle& r, const Vector& x);

struct RtContainsReport {
  double c0 = 0.0;        // min rho_{R_t} / rho_{K_{n+1}}
  double c0_prime = 0.0;  // min rho_{Z_t^+} / rho_{K_{n+1}}
  double floor = 0.0;
  std::size_t directions = 0;
  Vector witness;          // direction attaining the smaller of the two
  bool passed = false;
};

struct RtContainsOptions {
  double floor = 0.01;
  std::size_t support_net = 2000;
  std::size_t mc_budget = 100000;
  RngStream rng{0x4c0, 0};
};

/// Empirical constants of R_t ⊇ c0 K_{n+1} and Z_t^+ ⊇ c0' K_{n+1}, t >= 5n.
RtContainsReport rt_contains_kn1_check(const Measure& m, double t, const DirectionNet& directions,
                                       const RtContainsOptions& options = {});

}  // namespace depthlab
