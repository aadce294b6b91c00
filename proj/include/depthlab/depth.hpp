#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "depthlab/centroid.hpp"
#include "depthlab/core.hpp"
#include "depthlab/measure.hpp"
#include "depthlab/sphere.hpp"
#include "depthlab/transforms.hpp"

namespace depthlab {

/// Exact depth of a point on the line: min(P(X <= x), P(X >= x)).
double depth_1d(const Measure& m, double x);

struct TailValue {
  double value = 0.0;
  double std_error = 0.0;
  bool exact = false;
  bool unreliable = false;
};

/// mu({z : <z, xi> >= threshold}), from the catalog formula when one exists
/// and from a fixed sample pool otherwise.
class TailEvaluator {
 public:
  explicit TailEvaluator(Measure m, std::size_t mc_budget = 100000,
                         RngStream rng = RngStream{0x7a11, 0});

  /// xi need not be unit; the half-space is the same.
  TailValue tail(const Vector& xi, double threshold) const;

  bool exact() const { return !pool_; }
  const Measure& measure() const { return measure_; }
  /// Null for exact evaluators.
  const PointSet* pool() const { return pool_.get(); }
  int dimension() const { return measure_.dimension(); }

 private:
  Measure measure_;
  std::shared_ptr<const PointSet> pool_;
};

TailValue tail_mass(const TailEvaluator& tails, const Vector& xi, double threshold);

enum class DepthKind { kExact, kUpperBound, kInterval };

const char* to_string(DepthKind kind);

struct DepthEstimate {
  Vector point;
  double value = 0.0;
  DepthKind kind = DepthKind::kUpperBound;
  Vector best_direction;
  std::size_t tail_evaluations = 0;
  double std_error = 0.0;  // of the tail at best_direction; 0 when exact
};

struct DepthOptions {
  std::size_t net_size = 64;
  int refine_iters = 32;
  std::size_t mc_budget = 100000;
};

/// Direction search for the half-space depth. The tail masses over the fixed
/// net are read from sorted projections of the pool, so each point costs a
/// binary search per net direction plus `refine_iters` pool scans.
class DepthEstimator {
 public:
  DepthEstimator(Measure m, const DepthOptions& options = {}, RngStream rng = RngStream{0xde9, 0});

  /// `hints`: extra directions tried before the walk (any length).
  DepthEstimate estimate(const Vector& x, const std::vector<Vector>& hints = {},
                         RngStream walk = RngStream{0xde9, 1}) const;

  const TailEvaluator& tails() const { return tails_; }
  const DepthOptions& options() const { return options_; }
  const Measure& measure() const { return tails_.measure(); }

 private:
  TailEvaluator tails_;
  DepthOptions options_;
  DirectionNet net_;
  // Row j holds the sorted projections of the pool onto net_[j].
  std::shared_ptr<const std::vector<std::vector<double>>> sorted_;
};

DepthEstimate depth_estimate(const DepthEstimator& estimator, const Vector& x,
                             const std::vector<Vector>& hints = {});
DepthEstimate depth_estimate(const Measure& m, const Vector& x, const DepthOptions& options = {},
                             RngStream rng = RngStream{0xde9, 0});

struct CramerDepthBound {
  double value = 1.0;  // exp(-Lambda*(x))
  CramerValue cramer;
};

/// exp(-Lambda*(x)); an upper bound on the depth for centered measures since
/// the Cramer value is certified from below.
CramerDepthBound depth_upper_cramer(const LaplaceOracle& oracle, const Vector& x,
                                    const CramerOptions& options = {});

struct PzLowerBound {
  double value = 0.0;
  double gauge = 0.0;  // of x with respect to Z_t^+
  double delta = 0.0;
  Vector worst_direction;
  bool unreliable = false;
};

/// min over the net of (1 - delta^t)^2 (E g)^2 / E g^2 with g = <z, xi>_+^t.
/// Requires the gauge of x with respect to Z_t^+ to be at most delta.
PzLowerBound depth_lower_pz(const CentroidOracle& plus, const Vector& x, double delta,
                            const DirectionNet& net);

struct GrunbaumReport {
  double min_tail = 0.0;
  double bound = 0.0;  // 1/e - tolerance
  Vector witness;
  std::size_t directions = 0;
  bool passed = false;
};

GrunbaumReport grunbaum_check(const TailEvaluator& tails, const DirectionNet& net,
                              double tolerance = 0.01);

/// Monte-Carlo average of depth over samples of the measure; each outer point
/// gets its own child stream. Exact in dimension 1 and for spherically
/// symmetric kinds, an upper estimate otherwise.
Estimate expected_depth(const DepthEstimator& estimator, RngStream rng, std::size_t samples);
Estimate expected_depth(const Measure& m, RngStream rng, std::size_t samples,
                        const DepthOptions& options = {});

}  // namespace depthlab
