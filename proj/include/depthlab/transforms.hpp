#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <vector>

#include "depthlab/centroid.hpp"
#include "depthlab/core.hpp"
#include "depthlab/measure.hpp"
#include "depthlab/sphere.hpp"

namespace depthlab {

enum class LaplaceMode { kAuto, kAnalytic, kQuadrature1D, kMonteCarlo };

const char* to_string(LaplaceMode mode);

struct LaplaceValue {
  double value = 0.0;
  double std_error = 0.0;
  bool unreliable = false;
};

/// Logarithmic Laplace transform u -> log E e^{<u, X>}.
///
/// kAuto picks the closed form when the catalog has one, per-coordinate
/// quadrature for product measures, and plain Monte-Carlo averaging over a
/// fixed pool otherwise. Atomic measures are rejected.
class LaplaceOracle {
 public:
  explicit LaplaceOracle(Measure m, LaplaceMode mode = LaplaceMode::kAuto,
                         std::size_t mc_budget = 100000, RngStream rng = RngStream{0x1a9, 0});

  /// +inf where the integral diverges.
  double log_mgf(const Vector& u) const;
  LaplaceValue log_mgf_with_error(const Vector& u) const;
  /// Gradient (the tilted mean). Requires log_mgf(u) finite.
  Vector gradient(const Vector& u) const;

  LaplaceMode mode() const { return mode_; }
  const Measure& measure() const { return measure_; }
  int dimension() const { return measure_.dimension(); }

 private:
  struct State;

  double evaluate(const Vector& u, double* std_error) const;
  Vector evaluate_gradient(const Vector& u) const;

  Measure measure_;
  LaplaceMode mode_;
  std::shared_ptr<State> state_;
};

struct CramerOptions {
  double tol = 1e-9;  // on the sup-norm of the objective's gradient
  int max_iterations = 500;
  double divergence_radius = 1e8;
  std::optional<Vector> start;
};

/// Value of the Cramer transform sup_u <v,u> - Lambda(u), certified by the
/// maximizer: value == <v, maximizer> - Lambda(maximizer) whenever finite.
struct CramerValue {
  Vector point;
  double value = 0.0;
  Vector maximizer;
  bool converged = false;
  int iterations = 0;
  bool infinite = false;
  Vector certificate;  // direction of unbounded ascent when infinite
};

CramerValue cramer(const LaplaceOracle& oracle, const Vector& v, const CramerOptions& options = {});

struct RadialValue {
  double radius = 0.0;
  bool unbounded = false;
  int evaluations = 0;
};

/// Radial function of B_t = {Lambda* <= t} in direction xi, by bisection on
/// r -> Lambda*(r xi).
RadialValue bt_radial(const LaplaceOracle& oracle, const Vector& xi, double t, double rel_tol = 1e-8);

struct NestingReport {
  double rho_t = 0.0;
  double rho_s = 0.0;
  bool left_ok = false;   // rho_t <= rho_s
  bool right_ok = false;  // rho_s <= (s/t) rho_t
  bool passed = false;
};

NestingReport bt_nesting_check(const LaplaceOracle& oracle, const Vector& xi, double t, double s,
                               double rel_tol = 1e-6);

/// v in M_t: E|<v,x>|^t <= 1.
bool mt_membership(const MomentEvaluator& moments, const Vector& v, double t);

struct RegularityReport {
  double ratio = 0.0;  // (E|<y,x>|^s)^{1/s} / (E|<y,x>|^t)^{1/t}
  double bound = 0.0;  // c_emp * s / t
  bool passed = false;
};

RegularityReport regularity_ratio(const MomentEvaluator& moments, const Vector& y, double s, double t,
                                  double c_emp = 2.0);

/// max over directions and pairs s >= t >= 2 from `orders` of ratio * t / s.
double measure_alpha(const MomentEvaluator& moments, const DirectionNet& directions,
                     const std::vector<double>& orders);

struct BtInZtReport {
  double max_gauge = 0.0;
  double bound = 0.0;  // 4 e alpha
  double alpha = 0.0;
  Vector witness;
  std::size_t directions = 0;
  std::size_t unbounded = 0;
  bool passed = false;
};

/// Gauge of boundary points rho_{B_t}(xi) xi with respect to Z_t, over the
/// given directions. The support function of Z_t is tabulated on `support_net`.
BtInZtReport bt_in_zt_check(const LaplaceOracle& oracle, const CentroidOracle& zt,
                            const DirectionNet& directions, const DirectionNet& support_net,
                            double alpha);

}  // namespace depthlab
