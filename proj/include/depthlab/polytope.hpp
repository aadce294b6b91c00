#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "depthlab/core.hpp"
#include "depthlab/measure.hpp"
#include "depthlab/rng.hpp"
#include "depthlab/transforms.hpp"

namespace depthlab {

/// K_N = conv{X_1, ..., X_N}.
struct PolytopeSample {
  PointSet vertices;  // n x N
  RngStream generator;
  Vector centroid;    // of the vertices, for the quick separation test
  std::size_t count() const { return static_cast<std::size_t>(vertices.cols()); }
  int dimension() const { return static_cast<int>(vertices.rows()); }
};

PolytopeSample sample_polytope(const Measure& m, std::size_t count, RngStream rng);
PolytopeSample make_polytope(PointSet vertices);

/// x in conv(vertices); boundary points count as inside. Throws
/// kNumericalFailure rather than guessing when the LP cannot be verified.
bool contains(const PolytopeSample& p, const Vector& x, double tol = 1e-9);

struct ExpectedMeasureOptions {
  std::size_t reps = 8;
  std::size_t test_points = 1000;
  double dilation = 0.0;  // estimate nu((1 + dilation) K_N)
};

struct ExpectedMeasure {
  Estimate estimate;
  std::vector<double> per_rep;
  std::size_t lp_failures = 0;
  std::size_t aborted_reps = 0;
};

/// E nu(K_N) over K_N drawn from mu. Rep r uses rng.child(r); its vertices
/// and test points come from two children of that stream.
ExpectedMeasure expected_measure(const Measure& mu, const Measure& nu, std::size_t count, RngStream rng,
                                 const ExpectedMeasureOptions& options = {});

struct UpperBoundReport {
  double t = 0.0;
  std::size_t count = 0;
  Estimate nu_bt;  // nu(B_t) by Cramer membership
  double value = 0.0;  // min(1, nu(B_t) + N e^{-t})
  bool clamped = false;
  bool conservative = true;  // certified-from-below Cramer values can only enlarge B_t
  std::size_t nonconverged = 0;
};

/// min(1, nu_bt + N e^{-t}).
double upper_bound_value(double nu_bt, std::size_t count, double t);

/// Cramer values at `samples` points of nu (shared by every t of a sweep).
struct CramerSample {
  std::vector<double> values;
  std::size_t nonconverged = 0;
  std::uint64_t seed = 0;
};
CramerSample cramer_sample(const LaplaceOracle& oracle, const Measure& nu, RngStream rng, std::size_t samples);

UpperBoundReport upper_bound_lemma(const CramerSample& sample, double t, std::size_t count);
UpperBoundReport upper_bound_lemma(const LaplaceOracle& oracle, const Measure& nu, double t, std::size_t count,
                                   RngStream rng, std::size_t samples = 2000);
/// Smallest bound over a grid of t.
UpperBoundReport upper_bound_min(const CramerSample& sample, const std::vector<double>& ts, std::size_t count);

/// mu(A) max(0, 1 - 2 binom(N, n) (1 - inf_depth)^{N-n}), in log space.
double lower_bound_lemma(double inf_depth, std::size_t count, int n, double a_measure);

struct DilationReport {
  double delta = 0.0;
  Estimate mu_a;
  Estimate mu_dilated;
  double factor = 0.0;  // (1 + delta)^n e^{n delta}
  double excess = 0.0;  // mean of 1[(1+d)A] - factor 1[A]; <= 0 when the inequality holds
  double excess_se = 0.0;
  bool passed = false;  // excess <= sigmas * excess_se
};

/// Both sides from the same sample of mu (paired indicators).
DilationReport dilation_check(const Measure& m, const PolytopeSample& a, double delta, RngStream rng,
                              std::size_t samples = 20000, double sigmas = 3.0);

struct ThresholdPoint {
  std::size_t count = 0;
  Estimate estimate;
};

struct ThresholdCurve {
  std::vector<ThresholdPoint> points;
  std::optional<double> crossing;  // N at level 1/2, linear in (ln N, estimate)
  double kappa_emp = kNaN;          // ln(crossing) / n
  double kappa_est = kNaN;          // (1/n) E Lambda*, used for the default grid
  bool monotone = false;            // nondecreasing up to 2 sigma
  bool grid_extended = false;
  std::size_t budget_exceeded = 0;  // grid points cut short by the time budget
  std::size_t lp_failures = 0;
};

struct ThresholdOptions {
  std::vector<std::size_t> grid;  // empty: geometric ratio 2 from n + 1 to exp(1.6 kappa n)
  std::size_t reps = 4;
  std::size_t test_points = 500;
  double dilation = 0.0;
  std::size_t kappa_samples = 2000;
  std::size_t max_count = 1 << 20;
  double seconds_per_point = 0.0;  // 0: no limit
};

ThresholdCurve threshold_sweep(const Measure& m, RngStream rng, const ThresholdOptions& options = {});

/// (1/n) E Lambda*(X) over samples of m.
Estimate kappa_mu_estimate(const LaplaceOracle& oracle, const Measure& m, RngStream rng, std::size_t samples);

}  // namespace depthlab
