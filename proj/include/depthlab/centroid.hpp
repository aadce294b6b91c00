#pragma once

#include <cstddef>
#include <memory>
#include <optional>

#include "depthlab/core.hpp"
#include "depthlab/measure.hpp"
#include "depthlab/sphere.hpp"

namespace depthlab {

enum class MomentRoute { kClosedForm, kQuadrature, kMonteCarlo };

struct MomentValue {
  double value = 0.0;
  double std_error = 0.0;
  bool unreliable = false;
};

/// Power moments of linear functionals, E|<x,y>|^p and E<x,y>_+^p.
///
/// Gaussian and ball measures use closed forms, one-dimensional measures
/// with a density use adaptive quadrature, and everything else averages
/// over a fixed sample pool drawn once at construction (so repeated queries
/// share common random numbers).
class MomentEvaluator {
 public:
  explicit MomentEvaluator(Measure m, std::size_t mc_budget = 100000,
                           RngStream rng = RngStream{0x5eed, 0});

  MomentValue absolute(const Vector& y, double p) const;
  MomentValue positive(const Vector& y, double p) const;

  MomentRoute route() const { return route_; }
  const Measure& measure() const { return measure_; }
  int dimension() const { return measure_.dimension(); }

 private:
  MomentValue evaluate(const Vector& y, double p, bool one_sided) const;

  Measure measure_;
  MomentRoute route_;
  std::shared_ptr<const PointSet> pool_;
};

struct SupportValue {
  double value = 0.0;
  double std_error = 0.0;
  bool unreliable = false;
};

/// Support function of the L_t-centroid body Z_t, or of Z_t^+ when one-sided.
class CentroidOracle {
 public:
  CentroidOracle(MomentEvaluator moments, double t, bool one_sided = false);

  SupportValue support_with_error(const Vector& y) const;
  double support(const Vector& y) const { return support_with_error(y).value; }

  double t() const { return t_; }
  bool one_sided() const { return one_sided_; }
  const MomentEvaluator& moments() const { return moments_; }
  int dimension() const { return moments_.dimension(); }

 private:
  MomentEvaluator moments_;
  double t_;
  bool one_sided_;
};

SupportValue zt_support(const CentroidOracle& c, const Vector& y);

struct HalvingReport {
  double expected = 0.0;  // 2^{-1/t}
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  double worst_deviation = 0.0;  // relative
  double allowed_deviation = 0.0;
  Vector witness;
  bool passed = false;
};

/// h_{Z_t^+}(y) / h_{Z_t}(y) = 2^{-1/t} for even measures, over a net.
HalvingReport even_halving_check(const MomentEvaluator& moments, double t, const DirectionNet& net,
                                 double rel_tol = 0.02);

struct PlusInclusionReport {
  double left_factor = 0.0;   // (4/e)^{1/t - 1/s}
  double right_factor = 0.0;  // (4(e-1)/e)^{1/t - 1/s} * s/t, before c1
  double min_left_slack = 0.0;  // min h+_s / (left_factor h+_t); >= 1 means the inclusion holds
  double c1_required = 0.0;   // max h+_s / (right_factor h+_t)
  double c1 = 1.0;
  bool left_ok = false;
  bool right_ok = false;
  Vector witness;
  bool passed = false;
};

PlusInclusionReport zt_plus_inclusion_check(const MomentEvaluator& moments, double t, double s,
                                            const DirectionNet& net, double c1 = 1.0,
                                            double rel_tol = 1e-9);

struct PzMomentReport {
  double ratio = 0.0;  // (E g_+^{2t})^{1/2t} / (E g_+^t)^{1/t}
  double bound = 0.0;
  bool unreliable = false;
  bool passed = false;
};

PzMomentReport pz_moment_check(const MomentEvaluator& moments, const Vector& xi, double t,
                               double c_emp = 4.0);

struct VolumeRadiusReport {
  bool computed = false;
  double value = 0.0;  // |Z_t|^{1/n}
  double std_error = 0.0;
  double bound = 0.0;  // c_emp * sqrt(t/n)
  bool passed = false;
};

struct VolumeRadiusOptions {
  double c_emp = 4.0;
  std::size_t support_net = 0;  // 0: size chosen by dimension
  std::size_t integration_directions = 20000;
  RngStream rng{0xb01, 0};
};

/// |Z_t|^{1/n} by polar integration of the circumscribed polytope over a dense
/// support net. Refuses above dimension 6.
VolumeRadiusReport zt_volume_radius(const CentroidOracle& c, const VolumeRadiusOptions& options = {});

}  // namespace depthlab
