#include <algorithm>
#include <cmath>
#include <numbers>

#include "depthlab/ball_bodies.hpp"
#include "depthlab/centroid.hpp"
#include "depthlab/depth.hpp"
#include "depthlab/harness.hpp"
#include "depthlab/polytope.hpp"
#include "depthlab/sphere.hpp"
#include "depthlab/transforms.hpp"
#include "gaussian_oracle.hpp"

namespace depthlab {

namespace {

using Progress = std::function<void(const std::string&)>;

Cell I(std::size_t k) { return static_cast<std::int64_t>(k); }
Cell I(int k) { return static_cast<std::int64_t>(k); }
Cell D(double x) { return x; }

std::string tag(int n) { return "n=" + std::to_string(n); }
std::string tag(int n, double t) { return tag(n) + ",t=" + format_double(t); }
std::string tag(int n, double t, double s) { return tag(n, t) + ",s=" + format_double(s); }

struct Context {
  const ExperimentConfig& config;
  RunRecord& record;
  const Progress& progress;
  RngStream root;

  void note(const std::string& message) const {
    if (progress) progress(message);
  }
  Measure measure(int n) const { return Measure::make(config.measure, n); }
  double sigmas() const { return config.tolerances.sigmas; }
};

void run_expected_depth(const Context& cx) {
  const ExperimentConfig& c = cx.config;
  MetricTable& table = cx.record.table(
      "expected_depth",
      {"measure", "n", "value", "std_error", "ci_low", "ci_high", "samples", "kind", "oracle"});
  cx.record.plots.push_back(PlotSpec{"expected_depth", "expected_depth", "n", "value", "ci_low", "ci_high", "", "n",
                                     "E depth", false});
  DepthOptions opts;
  opts.net_size = c.budgets.net_size;
  opts.refine_iters = static_cast<int>(c.budgets.refine_iters);
  opts.mc_budget = c.budgets.mc_budget;
  for (const int n : c.dimensions) {
    const Measure m = cx.measure(n);
    const Estimate e = expected_depth(m, cx.root.child(n), c.budgets.samples, opts);
    const bool exact = n == 1 || (m.traits().spherically_symmetric && m.exact_tail(Vector::Unit(n, 0), 0.0));
    const bool gaussian = c.measure == MeasureKind::kGaussianStandard;
    const double oracle = gaussian ? detail::gaussian_expected_depth(n) : kNaN;
    table.add_row({std::string(kind_name(c.measure)), I(n), D(e.value), D(e.std_error), D(e.ci_low), D(e.ci_high),
                   I(e.samples), std::string(exact ? "exact" : "upper"),
                   gaussian ? Cell{oracle} : Cell{std::monostate{}}});
    if (n == 1) {
      cx.record.assertions.push_back(check_bound("expected depth 1D identity " + tag(n), std::fabs(e.value - 0.25),
                                                 c.tolerances.identity, false, "|E depth - 1/4|"));
    }
    if (gaussian) {
      cx.record.assertions.push_back(check_bound("expected depth matches Gaussian oracle " + tag(n),
                                                 std::fabs(e.value - oracle), cx.sigmas() * e.std_error + 1e-12,
                                                 false, "oracle " + format_double(oracle)));
    }
    cx.note("expected-depth " + tag(n) + " value " + format_double(e.value));
  }
}

void run_cramer_surface(const Context& cx) {
  const ExperimentConfig& c = cx.config;
  MetricTable& surface = cx.record.table(
      "cramer", {"n", "direction", "r", "value", "converged", "infinite", "iterations"});
  MetricTable& ray = cx.record.table("cramer_ray", {"n", "r", "value"});
  MetricTable& radial = cx.record.table("bt_radial", {"n", "t", "direction", "radius", "unbounded"});
  cx.record.plots.push_back(PlotSpec{"cramer_ray", "cramer_ray", "r", "value", "", "", "n", "r (along e1)",
                                     "Cramer transform", false});
  std::vector<double> radii = c.radii;
  std::sort(radii.begin(), radii.end());
  for (const int n : c.dimensions) {
    const Measure m = cx.measure(n);
    if (m.atomic()) {
      cx.record.assertions.push_back(skipped("cramer surface " + tag(n), "Laplace transform needs a density"));
      continue;
    }
    const RngStream base = cx.root.child(n);
    const LaplaceOracle oracle(m, LaplaceMode::kAuto, c.budgets.mc_budget, base.child(0));
    DirectionNet dirs;
    if (n > 1) dirs.push_back(Vector::Unit(n, 0));
    for (const Vector& v : direction_net(n, c.budgets.net_size, base.child(1))) dirs.push_back(v);

    std::size_t nonconverged = 0, decreases = 0;
    double gaussian_error = 0.0;
    for (std::size_t d = 0; d < dirs.size(); ++d) {
      CramerOptions opts;
      double previous = 0.0;
      for (const double r : radii) {
        const CramerValue v = cramer(oracle, r * dirs[d], opts);
        if (!v.converged) ++nonconverged;
        if (v.value < previous - 1e-9 * (1.0 + std::fabs(previous))) ++decreases;
        previous = v.value;
        if (!v.infinite) opts.start = v.maximizer;
        if (c.measure == MeasureKind::kGaussianStandard) {
          gaussian_error = std::max(gaussian_error, std::fabs(v.value - 0.5 * r * r));
        }
        surface.add_row({I(n), I(d), D(r), D(v.value), v.converged, v.infinite, I(v.iterations)});
        if (d == 0) ray.add_row({I(n), D(r), D(v.value)});
      }
    }
    cx.record.assertions.push_back(
        check_bound("cramer converged " + tag(n), static_cast<double>(nonconverged), 0.0, false, "non-converged"));
    cx.record.assertions.push_back(check_bound("cramer nondecreasing along rays " + tag(n),
                                               static_cast<double>(decreases), 0.0, false, "decreases"));
    if (c.measure == MeasureKind::kGaussianStandard) {
      cx.record.assertions.push_back(check_bound("cramer Gaussian closed form " + tag(n), gaussian_error,
                                                 c.tolerances.cramer, false, "max |value - r^2/2|"));
    }

    std::vector<double> orders = c.orders;
    std::sort(orders.begin(), orders.end());
    std::vector<std::vector<double>> rho(orders.size(), std::vector<double>(dirs.size()));
    double gaussian_radius_error = 0.0;
    for (std::size_t k = 0; k < orders.size(); ++k) {
      for (std::size_t d = 0; d < dirs.size(); ++d) {
        const RadialValue rv = bt_radial(oracle, dirs[d], orders[k]);
        rho[k][d] = rv.unbounded ? kInf : rv.radius;
        radial.add_row({I(n), D(orders[k]), I(d), D(rho[k][d]), rv.unbounded});
        if (c.measure == MeasureKind::kGaussianStandard) {
          const double exact = std::sqrt(2.0 * orders[k]);
          gaussian_radius_error = std::max(gaussian_radius_error, std::fabs(rv.radius - exact) / exact);
        }
      }
    }
    for (std::size_t k = 0; k + 1 < orders.size(); ++k) {
      const double t = orders[k], s = orders[k + 1];
      std::size_t violations = 0;
      for (std::size_t d = 0; d < dirs.size(); ++d) {
        const double a = rho[k][d], b = rho[k + 1][d];
        if (a > b * (1.0 + 1e-6) || b > (s / t) * a * (1.0 + 1e-6)) ++violations;
      }
      cx.record.assertions.push_back(check_bound("B_t nesting " + tag(n, t, s), static_cast<double>(violations), 0.0,
                                                 false, "B_t in B_s in (s/t) B_t"));
    }
    if (c.measure == MeasureKind::kGaussianStandard) {
      cx.record.assertions.push_back(check_bound("B_t Gaussian radius " + tag(n), gaussian_radius_error, 1e-6, false,
                                                 "max relative error vs sqrt(2t)"));
    }
    cx.note("cramer-surface " + tag(n));
  }
}

void run_inclusion_suite(const Context& cx) {
  const ExperimentConfig& c = cx.config;
  MetricTable& table = cx.record.table("inclusions", {"check", "n", "t", "s", "measured", "bound", "status"});
  const auto add = [&](Assertion a, int n, double t, double s) {
    table.add_row({a.name, I(n), D(t), D(s), D(a.measured), D(a.bound), std::string(to_string(a.status))});
    cx.record.assertions.push_back(std::move(a));
  };
  std::vector<double> orders = c.orders;
  std::sort(orders.begin(), orders.end());
  std::vector<double> orders2;
  for (const double t : orders) {
    if (t >= 2.0) orders2.push_back(t);
  }
  for (const int n : c.dimensions) {
    const Measure m = cx.measure(n);
    if (m.atomic()) {
      cx.record.assertions.push_back(skipped("inclusion suite " + tag(n), "body constructions need a density"));
      continue;
    }
    const RngStream base = cx.root.child(n);
    const MomentEvaluator moments(m, c.budgets.mc_budget, base.child(0));
    const DirectionNet dirs = direction_net(n, c.budgets.directions, base.child(1));
    const DirectionNet support_net = direction_net(n, 4 * c.budgets.directions, base.child(2));

    double alpha = kNaN;
    if (orders2.size() >= 2) {
      alpha = measure_alpha(moments, dirs, orders2);
      add(check_bound("alpha_emp " + tag(n), alpha, 2.0, false, "max ratio t/s over order pairs"), n, kNaN, kNaN);
    } else {
      cx.record.assertions.push_back(skipped("alpha_emp " + tag(n), "needs two orders >= 2"));
    }
    if (std::isfinite(alpha)) {
      const LaplaceOracle lap(m, LaplaceMode::kAuto, c.budgets.mc_budget, base.child(3));
      for (const double t : orders2) {
        const BtInZtReport r = bt_in_zt_check(lap, CentroidOracle(moments, t), dirs, support_net, alpha);
        add(check_bound("B_t in 4e alpha Z_t " + tag(n, t), r.max_gauge, r.bound, false, "max gauge"), n, t, kNaN);
      }
    }
    for (std::size_t i = 0; i < orders.size(); ++i) {
      for (std::size_t j = i + 1; j < orders.size(); ++j) {
        const double t = orders[i], s = orders[j];
        const KtInclusionReport r = kt_inclusion_check(m, t, s, dirs);
        add(check_bound("K_t chain " + tag(n, t, s), std::min(r.min_left_slack, r.min_right_slack), 1.0 - 1e-9, true,
                        "min slack of both inclusions"),
            n, t, s);
      }
    }
    if (m.traits().even) {
      for (const double t : orders2) {
        const HalvingReport r = even_halving_check(moments, t, dirs);
        add(check_bound("Z_t+ halving " + tag(n, t), r.worst_deviation, r.allowed_deviation, false,
                        "relative deviation from 2^(-1/t)"),
            n, t, kNaN);
      }
    }
    for (std::size_t i = 0; i < orders2.size(); ++i) {
      for (std::size_t j = i + 1; j < orders2.size(); ++j) {
        const double t = orders2[i], s = orders2[j];
        const PlusInclusionReport r = zt_plus_inclusion_check(moments, t, s, dirs);
        add(check_bound("Z_t+ left inclusion " + tag(n, t, s), r.min_left_slack, 1.0 - 1e-9, true, "min slack"), n,
            t, s);
        add(check_bound("Z_t+ right inclusion " + tag(n, t, s), r.c1_required, r.c1, false, "required c1"), n, t, s);
      }
    }
    if (n <= 4) {
      VolumeIdentityOptions vo;
      vo.kn_tolerance = c.tolerances.volume;
      vo.rng = base.child(4);
      const VolumeIdentityReport r = volume_identity_check(m, vo);
      add(check_bound("|K_n| f(0) = 1 " + tag(n), std::fabs(r.kn_volume_f0 - 1.0), c.tolerances.volume, false,
                      "|K_n| f(0) = " + format_double(r.kn_volume_f0)),
          n, static_cast<double>(n), kNaN);
      Assertion band = check_bound("K_{n+1} volume band " + tag(n), r.kn1_scaled, r.band_hi, false,
                                   "band [" + format_double(r.band_lo) + ", " + format_double(r.band_hi) + "]");
      band.relation = "in";
      if (!r.kn1_ok) band.status = AssertionStatus::kFail;
      add(std::move(band), n, n + 1.0, kNaN);
    } else {
      cx.record.assertions.push_back(skipped("K_n volume identity " + tag(n), "polar integration limited to n <= 4"));
    }
    cx.note("inclusion-suite " + tag(n));
  }
}

void run_threshold_sweep(const Context& cx) {
  const ExperimentConfig& c = cx.config;
  MetricTable& curve_table =
      cx.record.table("threshold", {"n", "N", "ln_N", "value", "std_error", "ci_low", "ci_high"});
  MetricTable& summary = cx.record.table(
      "threshold_summary", {"n", "kappa_est", "kappa_emp", "crossing", "monotone", "grid_extended",
                            "budget_exceeded", "lp_failures"});
  cx.record.plots.push_back(PlotSpec{"threshold", "threshold", "N", "value", "ci_low", "ci_high", "n", "N",
                                     "E mu(K_N)", c.log_x});
  for (const int n : c.dimensions) {
    const Measure m = cx.measure(n);
    ThresholdOptions opts;
    opts.grid = c.counts;
    opts.reps = c.budgets.reps;
    opts.test_points = c.budgets.test_points;
    opts.kappa_samples = c.budgets.kappa_samples;
    opts.max_count = c.budgets.max_count;
    opts.seconds_per_point = c.budgets.seconds_per_point.value_or(0.0);
    const ThresholdCurve curve = threshold_sweep(m, cx.root.child(n), opts);
    for (const ThresholdPoint& p : curve.points) {
      const Estimate& e = p.estimate;
      curve_table.add_row({I(n), I(p.count), D(std::log(static_cast<double>(p.count))), D(e.value), D(e.std_error),
                           D(e.ci_low), D(e.ci_high)});
    }
    summary.add_row({I(n), D(curve.kappa_est), D(curve.kappa_emp),
                     curve.crossing ? Cell{*curve.crossing} : Cell{std::monostate{}}, curve.monotone,
                     curve.grid_extended, I(curve.budget_exceeded), I(curve.lp_failures)});
    Assertion mono = check_bound("threshold curve nondecreasing " + tag(n), curve.monotone ? 1.0 : 0.0, 1.0, true,
                                 "2 sigma slack");
    cx.record.assertions.push_back(std::move(mono));
    if (curve.crossing) {
      Assertion a;
      a.name = "threshold crossing found " + tag(n);
      a.status = AssertionStatus::kPass;
      a.measured = curve.kappa_emp;
      a.detail = "kappa_emp = ln(N_1/2)/n";
      cx.record.assertions.push_back(std::move(a));
    } else {
      cx.record.assertions.push_back(skipped("threshold crossing found " + tag(n), "curve stays below 1/2 on the grid"));
    }
    if (curve.budget_exceeded > 0) {
      cx.record.assertions.push_back(
          skipped("threshold time budget " + tag(n), std::to_string(curve.budget_exceeded) + " grid points cut short"));
    }
    cx.note("threshold-sweep " + tag(n) + " points " + std::to_string(curve.points.size()));
  }
}

void run_bound_sandwich(const Context& cx) {
  const ExperimentConfig& c = cx.config;
  MetricTable& table = cx.record.table(
      "bound_sandwich", {"n", "N", "lower", "inf_depth", "mu_A", "measured", "std_error", "ci_low", "ci_high",
                         "upper", "t_upper", "nu_bt_std_error"});
  cx.record.plots.push_back(PlotSpec{"bound_sandwich", "bound_sandwich", "N", "measured", "ci_low", "ci_high", "n",
                                     "N", "E mu(K_N)", true});
  const std::vector<std::size_t> counts =
      c.counts.empty() ? std::vector<std::size_t>{25, 100, 400} : c.counts;
  constexpr double kEpsilon = 0.25;
  for (const int n : c.dimensions) {
    const Measure m = cx.measure(n);
    if (m.atomic()) {
      cx.record.assertions.push_back(skipped("bound sandwich " + tag(n), "bounds need a density"));
      continue;
    }
    const RngStream base = cx.root.child(n);
    const double t_lower = 5.0 * n;

    // Lower side: A = (1 - eps) Z_t^+ with t = 5n; the depth bound holds on all of A.
    const CentroidOracle plus(MomentEvaluator(m, c.budgets.mc_budget, base.child(1)), t_lower, true);
    const DirectionNet net = direction_net(n, c.budgets.net_size, base.child(2));
    const PzLowerBound pz = depth_lower_pz(plus, Vector::Zero(n), 1.0 - kEpsilon, net);
    const SupportTable support =
        SupportTable::build(direction_net(n, c.budgets.directions, base.child(5)),
                            [&](const Vector& y) { return plus.support(y); });
    const PointSet pts = m.sample(base.child(3), c.budgets.samples);
    std::size_t inside = 0;
    for (Eigen::Index i = 0; i < pts.cols(); ++i) {
      if (support.gauge(pts.col(i)) <= 1.0 - kEpsilon) ++inside;
    }
    const double mu_a = static_cast<double>(inside) / static_cast<double>(pts.cols());

    // Upper side: min over a t grid, one Cramer sample shared by all N.
    const CramerSample cs = cramer_sample(LaplaceOracle(m), m, base.child(4), c.budgets.samples);

    ExpectedMeasureOptions em;
    em.reps = c.budgets.reps;
    em.test_points = c.budgets.test_points;
    for (std::size_t i = 0; i < counts.size(); ++i) {
      const std::size_t count = counts[i];
      const ExpectedMeasure e = expected_measure(m, m, count, base.child(0).child(i), em);
      const double lower = lower_bound_lemma(pz.value, count, n, mu_a);
      std::vector<double> ts;
      const double t_max = 2.0 * std::log(static_cast<double>(count)) + 2.0 * n + 10.0;
      for (int k = 1; k <= 80; ++k) ts.push_back(t_max * k / 80.0);
      const UpperBoundReport up = upper_bound_min(cs, ts, count);
      const Estimate& x = e.estimate;
      table.add_row({I(n), I(count), D(lower), D(pz.value), D(mu_a), D(x.value), D(x.std_error), D(x.ci_low),
                     D(x.ci_high), D(up.value), D(up.t), D(up.nu_bt.std_error)});
      const std::string where = tag(n) + ",N=" + std::to_string(count);
      cx.record.assertions.push_back(
          check_bound("lower bound <= E mu(K_N) " + where, lower, x.value + cx.sigmas() * x.std_error, false));
      cx.record.assertions.push_back(check_bound(
          "E mu(K_N) <= upper bound " + where, x.value,
          up.value + cx.sigmas() * std::hypot(x.std_error, up.nu_bt.std_error), false,
          "t = " + format_double(up.t)));
      cx.note("bound-sandwich " + where + " measured " + format_double(x.value));
    }
  }
}

void run_dilation(const Context& cx) {
  const ExperimentConfig& c = cx.config;
  MetricTable& table = cx.record.table(
      "dilation", {"n", "polytope", "delta", "mu_a", "mu_dilated", "factor", "excess", "excess_se", "passed"});
  for (const int n : c.dimensions) {
    const Measure m = cx.measure(n);
    if (m.atomic()) {
      cx.record.assertions.push_back(skipped("dilation " + tag(n), "needs a density"));
      continue;
    }
    std::size_t violations = 0, checks = 0;
    double worst = -kInf;
    for (std::size_t p = 0; p < c.budgets.polytopes; ++p) {
      const RngStream base = cx.root.child(n).child(p);
      const PolytopeSample a = sample_polytope(m, c.budgets.polytope_vertices, base.child(0));
      for (std::size_t k = 0; k < c.deltas.size(); ++k) {
        const DilationReport r = dilation_check(m, a, c.deltas[k], base.child(1 + k), c.budgets.samples, cx.sigmas());
        table.add_row({I(n), I(p), D(c.deltas[k]), D(r.mu_a.value), D(r.mu_dilated.value), D(r.factor), D(r.excess),
                       D(r.excess_se), r.passed});
        ++checks;
        if (!r.passed) ++violations;
        if (r.excess_se > 0.0) worst = std::max(worst, r.excess / r.excess_se);
      }
    }
    cx.record.assertions.push_back(check_bound("dilation inequality " + tag(n), static_cast<double>(violations), 0.0,
                                               false,
                                               std::to_string(checks) + " checks, worst excess " +
                                                   format_double(worst) + " sigma"));
    cx.note("dilation " + tag(n));
  }
}

}  // namespace

RunRecord run(const ExperimentConfig& config) { return run(config, {}); }

RunRecord run(const ExperimentConfig& config, const Progress& progress) {
  RunRecord record;
  record.experiment = std::string(experiment_name(config.experiment));
  record.config_hash = config_hash(config);
  record.version = artifact_version();
  record.seed = config.seed;
  record.started = utc_timestamp();
  const Context cx{config, record, progress, RngStream{config.seed, 0}};
  try {
    switch (config.experiment) {
      case ExperimentKind::kExpectedDepth: run_expected_depth(cx); break;
      case ExperimentKind::kCramerSurface: run_cramer_surface(cx); break;
      case ExperimentKind::kInclusionSuite: run_inclusion_suite(cx); break;
      case ExperimentKind::kThresholdSweep: run_threshold_sweep(cx); break;
      case ExperimentKind::kBoundSandwich: run_bound_sandwich(cx); break;
      case ExperimentKind::kDilation: run_dilation(cx); break;
    }
  } catch (const std::exception& e) {
    record.partial = true;
    record.error = e.what();
  }
  record.finished = utc_timestamp();
  return record;
}

}  // namespace depthlab
