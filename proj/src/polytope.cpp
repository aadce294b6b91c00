#include "depthlab/polytope.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "depthlab/lp.hpp"
#include "depthlab/numeric.hpp"
#include "depthlab/parallel.hpp"

namespace depthlab {

PolytopeSample make_polytope(PointSet vertices) {
  if (vertices.cols() == 0) throw Error(Errc::kInvalidArgument, "polytope: no vertices");
  PolytopeSample p;
  p.centroid = vertices.rowwise().mean();
  p.vertices = std::move(vertices);
  return p;
}

PolytopeSample sample_polytope(const Measure& m, std::size_t count, RngStream rng) {
  if (count <= static_cast<std::size_t>(m.dimension())) {
    throw Error(Errc::kInvalidArgument, "sample_polytope: need N > n");
  }
  PolytopeSample p = make_polytope(m.sample(rng, count));
  p.generator = rng;
  return p;
}

bool contains(const PolytopeSample& p, const Vector& x, double tol) {
  require_dimension(x, p.dimension(), "contains");
  // Every vertex strictly below x along x - centroid certifies x is outside.
  const Vector d = x - p.centroid;
  if (d.squaredNorm() > 0.0) {
    const double at_x = d.dot(x);
    const double top = (p.vertices.transpose() * d).maxCoeff();
    if (top < at_x - 1e-12 * (1.0 + std::fabs(at_x))) return false;
  }
  return hull_feasibility(p.vertices, x, tol).inside;
}

ExpectedMeasure expected_measure(const Measure& mu, const Measure& nu, std::size_t count, RngStream rng,
                                 const ExpectedMeasureOptions& options) {
  if (options.reps < 1) throw Error(Errc::kInvalidArgument, "expected_measure: reps must be >= 1");
  if (options.test_points < 100) throw Error(Errc::kInvalidArgument, "expected_measure: test_points must be >= 100");
  if (mu.dimension() != nu.dimension()) throw Error(Errc::kDimensionMismatch, "expected_measure: dimensions differ");
  if (options.dilation < 0.0) throw Error(Errc::kInvalidArgument, "expected_measure: dilation must be >= 0");
  ExpectedMeasure out;
  const double scale = 1.0 + options.dilation;
  std::vector<double> binomial_var;
  for (std::size_t r = 0; r < options.reps; ++r) {
    const PolytopeSample k = sample_polytope(mu, count, rng.child(r).child(0));
    const PointSet points = nu.sample(rng.child(r).child(1), options.test_points);
    std::vector<signed char> status(options.test_points, 0);
    parallel_for(options.test_points, [&](std::size_t i) {
      try {
        status[i] = contains(k, points.col(static_cast<Eigen::Index>(i)) / scale) ? 1 : 0;
      } catch (const Error& e) {
        if (e.code() != Errc::kNumericalFailure) throw;
        status[i] = -1;
      }
    });
    const auto failures = static_cast<std::size_t>(std::count(status.begin(), status.end(), -1));
    out.lp_failures += failures;
    if (static_cast<double>(failures) > 0.001 * static_cast<double>(options.test_points)) {
      ++out.aborted_reps;
      continue;
    }
    const auto inside = static_cast<double>(std::count(status.begin(), status.end(), 1));
    const auto valid = static_cast<double>(options.test_points - failures);
    const double p = inside / valid;
    out.per_rep.push_back(p);
    binomial_var.push_back(p * (1.0 - p) / valid);
  }
  if (out.per_rep.empty()) {
    throw Error(Errc::kNumericalFailure, "expected_measure: every rep aborted on LP failures");
  }
  Estimate e = mean_estimate(out.per_rep.data(), out.per_rep.size(), rng.seed);
  const double reps = static_cast<double>(out.per_rep.size());
  const double within = pairwise_sum(binomial_var.data(), binomial_var.size()) / (reps * reps);
  const double between = out.per_rep.size() > 1 ? e.std_error * e.std_error : 0.0;
  e = make_estimate(e.value, std::sqrt(std::max(within, between)),
                    out.per_rep.size() * options.test_points, rng.seed);
  out.estimate = e;
  return out;
}

double upper_bound_value(double nu_bt, std::size_t count, double t) {
  return std::min(1.0, nu_bt + static_cast<double>(count) * std::exp(-t));
}

CramerSample cramer_sample(const LaplaceOracle& oracle, const Measure& nu, RngStream rng, std::size_t samples) {
  if (samples < 2) throw Error(Errc::kInvalidArgument, "cramer_sample: needs at least two samples");
  const PointSet points = nu.sample(rng, samples);
  CramerSample out;
  out.seed = rng.seed;
  out.values.resize(samples);
  std::vector<char> ok(samples, 1);
  parallel_for(samples, [&](std::size_t i) {
    const CramerValue c = cramer(oracle, points.col(static_cast<Eigen::Index>(i)));
    out.values[i] = c.value;
    ok[i] = c.converged;
  });
  out.nonconverged = static_cast<std::size_t>(std::count(ok.begin(), ok.end(), 0));
  return out;
}

UpperBoundReport upper_bound_lemma(const CramerSample& sample, double t, std::size_t count) {
  if (!(t > 0.0)) throw Error(Errc::kInvalidArgument, "upper_bound_lemma: t must be positive");
  UpperBoundReport r;
  r.t = t;
  r.count = count;
  r.nonconverged = sample.nonconverged;
  std::vector<double> inside(sample.values.size());
  std::transform(sample.values.begin(), sample.values.end(), inside.begin(),
                 [t](double v) { return v <= t ? 1.0 : 0.0; });
  r.nu_bt = mean_estimate(inside.data(), inside.size(), sample.seed);
  const double raw = r.nu_bt.value + static_cast<double>(count) * std::exp(-t);
  r.clamped = raw > 1.0;
  r.value = upper_bound_value(r.nu_bt.value, count, t);
  return r;
}

UpperBoundReport upper_bound_lemma(const LaplaceOracle& oracle, const Measure& nu, double t, std::size_t count,
                                   RngStream rng, std::size_t samples) {
  return upper_bound_lemma(cramer_sample(oracle, nu, rng, samples), t, count);
}

UpperBoundReport upper_bound_min(const CramerSample& sample, const std::vector<double>& ts, std::size_t count) {
  if (ts.empty()) throw Error(Errc::kInvalidArgument, "upper_bound_min: empty t grid");
  UpperBoundReport best;
  best.value = kInf;
  for (double t : ts) {
    UpperBoundReport r = upper_bound_lemma(sample, t, count);
    if (r.value < best.value) best = r;
  }
  return best;
}

double lower_bound_lemma(double inf_depth, std::size_t count, int n, double a_measure) {
  if (!(inf_depth >= 0.0 && inf_depth <= 1.0)) throw Error(Errc::kInvalidArgument, "lower_bound_lemma: depth outside [0, 1]");
  if (count <= static_cast<std::size_t>(n)) throw Error(Errc::kInvalidArgument, "lower_bound_lemma: need N > n");
  if (inf_depth >= 1.0) return a_measure;
  const double big_n = static_cast<double>(count);
  const double log_term = std::log(2.0) + numeric::log_binomial(big_n, n) + (big_n - n) * std::log1p(-inf_depth);
  return a_measure * std::max(0.0, 1.0 - std::exp(log_term));
}

DilationReport dilation_check(const Measure& m, const PolytopeSample& a, double delta, RngStream rng,
                              std::size_t samples, double sigmas) {
  if (!(delta >= 0.0)) throw Error(Errc::kInvalidArgument, "dilation_check: delta must be >= 0");
  if (m.atomic()) throw Error(Errc::kUndefinedForAtomic, "dilation_check: needs a density");
  if (!m.traits().centered) throw Error(Errc::kNotApplicable, "dilation_check: measure must be centered");
  const int n = m.dimension();
  const PointSet points = m.sample(rng, samples);
  std::vector<double> in_a(samples), in_dilated(samples);
  parallel_for(samples, [&](std::size_t i) {
    const Vector x = points.col(static_cast<Eigen::Index>(i));
    in_a[i] = contains(a, x) ? 1.0 : 0.0;
    in_dilated[i] = in_a[i] > 0.0 || contains(a, x / (1.0 + delta)) ? 1.0 : 0.0;
  });
  DilationReport r;
  r.delta = delta;
  r.factor = std::pow(1.0 + delta, n) * std::exp(n * delta);
  r.mu_a = mean_estimate(in_a.data(), samples, rng.seed);
  r.mu_dilated = mean_estimate(in_dilated.data(), samples, rng.seed);
  std::vector<double> excess(samples);
  for (std::size_t i = 0; i < samples; ++i) excess[i] = in_dilated[i] - r.factor * in_a[i];
  const Estimate e = mean_estimate(excess.data(), samples, rng.seed);
  r.excess = e.value;
  r.excess_se = e.std_error;
  r.passed = r.excess <= sigmas * r.excess_se;
  return r;
}

Estimate kappa_mu_estimate(const LaplaceOracle& oracle, const Measure& m, RngStream rng, std::size_t samples) {
  if (!m.traits().centered) throw Error(Errc::kNotApplicable, "kappa_mu_estimate: measure must be centered");
  const CramerSample s = cramer_sample(oracle, m, rng, samples);
  std::vector<double> scaled(s.values.size());
  const double n = m.dimension();
  std::transform(s.values.begin(), s.values.end(), scaled.begin(), [n](double v) { return v / n; });
  Estimate e = mean_estimate(scaled.data(), scaled.size(), rng.seed);
  e.unreliable = s.nonconverged > 0 || !std::isfinite(e.value);
  return e;
}

namespace {

void locate_crossing(ThresholdCurve& c, int n) {
  c.crossing.reset();
  for (std::size_t i = 0; i < c.points.size(); ++i) {
    const double e = c.points[i].estimate.value;
    if (e < 0.5) continue;
    if (i == 0) {
      c.crossing = static_cast<double>(c.points[0].count);
    } else {
      const double e0 = c.points[i - 1].estimate.value;
      const double l0 = std::log(static_cast<double>(c.points[i - 1].count));
      const double l1 = std::log(static_cast<double>(c.points[i].count));
      c.crossing = std::exp(l0 + (0.5 - e0) / (e - e0) * (l1 - l0));
    }
    break;
  }
  c.kappa_emp = c.crossing ? std::log(*c.crossing) / n : kNaN;
}

}  // namespace

ThresholdCurve threshold_sweep(const Measure& m, RngStream rng, const ThresholdOptions& options) {
  const int n = m.dimension();
  ThresholdCurve c;
  std::vector<std::size_t> grid = options.grid;
  if (options.kappa_samples > 0 && !m.atomic() && m.has_analytic_log_mgf()) {
    c.kappa_est = kappa_mu_estimate(LaplaceOracle(m), m, rng.child(0), options.kappa_samples).value;
  }
  const bool default_grid = grid.empty();
  if (default_grid) {
    if (!std::isfinite(c.kappa_est)) {
      throw Error(Errc::kInvalidArgument, "threshold_sweep: no grid given and kappa could not be estimated");
    }
    const double top = std::exp(1.6 * c.kappa_est * n);
    for (std::size_t k = static_cast<std::size_t>(n) + 1; k <= options.max_count; k *= 2) {
      grid.push_back(k);
      if (static_cast<double>(k) >= top) break;
    }
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] <= static_cast<std::size_t>(n) || (i > 0 && grid[i] <= grid[i - 1])) {
      throw Error(Errc::kInvalidArgument, "threshold_sweep: grid must be increasing with N > n");
    }
  }

  ExpectedMeasureOptions em;
  em.test_points = options.test_points;
  em.dilation = options.dilation;
  const auto run_point = [&](std::size_t index, std::size_t count) {
    const RngStream stream = rng.child(1).child(index);
    ThresholdPoint p;
    p.count = count;
    if (options.seconds_per_point > 0.0) {
      // Reps one at a time so the budget can stop the point early.
      const auto start = std::chrono::steady_clock::now();
      std::vector<double> values;
      double var = 0.0;
      em.reps = 1;
      for (std::size_t r = 0; r < options.reps; ++r) {
        const ExpectedMeasure e = expected_measure(m, m, count, stream.child(r), em);
        c.lp_failures += e.lp_failures;
        values.push_back(e.estimate.value);
        var += e.estimate.std_error * e.estimate.std_error;
        const std::chrono::duration<double> spent = std::chrono::steady_clock::now() - start;
        if (spent.count() > options.seconds_per_point && r + 1 < options.reps) {
          ++c.budget_exceeded;
          break;
        }
      }
      const double k = static_cast<double>(values.size());
      p.estimate = make_estimate(pairwise_sum(values.data(), values.size()) / k, std::sqrt(var) / k,
                                 values.size() * options.test_points, stream.seed);
    } else {
      em.reps = options.reps;
      const ExpectedMeasure e = expected_measure(m, m, count, stream, em);
      c.lp_failures += e.lp_failures;
      p.estimate = e.estimate;
    }
    c.points.push_back(p);
  };
  for (std::size_t i = 0; i < grid.size(); ++i) run_point(i, grid[i]);
  locate_crossing(c, n);
  while (default_grid && !c.crossing && grid.back() * 2 <= options.max_count) {
    grid.push_back(grid.back() * 2);
    c.grid_extended = true;
    run_point(grid.size() - 1, grid.back());
    locate_crossing(c, n);
  }

  c.monotone = true;
  for (std::size_t i = 1; i < c.points.size(); ++i) {
    const Estimate& a = c.points[i - 1].estimate;
    const Estimate& b = c.points[i].estimate;
    const double slack = 2.0 * std::hypot(a.std_error, b.std_error);
    if (b.value < a.value - slack) c.monotone = false;
  }
  return c;
}

}  // namespace depthlab
