#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "doctest.h"
#include "depthlab/numeric.hpp"
#include "depthlab/transforms.hpp"

using namespace depthlab;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double a : v) x[i++] = a;
  return x;
}

Vector one(double a) { return Vector::Constant(1, a); }

double gk(const std::function<double(double)>& f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 20, 1e-14);
}

// log E e^{u <x, e1>} for the uniform unit ball in R^n, from the marginal
// density proportional to (1 - s^2)^{(n-1)/2}.
double ball_log_mgf_oracle(int n, double u) {
  const double k = (n - 1) / 2.0;
  const double z = gk([&](double s) { return std::pow(1.0 - s * s, k); }, -1.0, 1.0);
  const double w = gk([&](double s) { return std::exp(u * (s - 1.0)) * std::pow(1.0 - s * s, k); }, -1.0, 1.0);
  return u + std::log(w / z);
}

// sup_u (v u - L(u)) by a fine grid then golden-section refinement.
double conjugate_oracle(const std::function<double(double)>& lambda, double v, double lo, double hi) {
  double best_u = 0.0, best = 0.0;
  for (int i = 0; i <= 200000; ++i) {
    const double u = lo + (hi - lo) * i / 200000.0;
    const double f = v * u - lambda(u);
    if (f > best) {
      best = f;
      best_u = u;
    }
  }
  double a = best_u - (hi - lo) / 100000.0, b = best_u + (hi - lo) / 100000.0;
  for (int i = 0; i < 200; ++i) {
    const double m1 = a + (b - a) * 0.381966, m2 = b - (b - a) * 0.381966;
    if (v * m1 - lambda(m1) < v * m2 - lambda(m2)) a = m1; else b = m2;
  }
  return std::max(best, v * a - lambda(a));
}

}  // namespace

TEST_SUITE("transforms") {
  TEST_CASE("log_mgf examples") {
    const LaplaceOracle g(Measure::make(MeasureKind::kGaussianStandard, 2));
    CHECK(g.log_mgf(vec({1.0, 1.0})) == doctest::Approx(1.0));
    const LaplaceOracle c(Measure::make(MeasureKind::kUniformCube, 1));
    const double oracle = std::log(gk([](double x) { return 0.5 * std::exp(2.0 * x); }, -1.0, 1.0));
    CHECK(c.log_mgf(one(2.0)) == doctest::Approx(oracle).epsilon(1e-13));
    CHECK(c.log_mgf(one(2.0)) == doctest::Approx(0.5952201921).epsilon(1e-9));
    const LaplaceOracle e(Measure::make(MeasureKind::kProductExponentialCentered, 1));
    CHECK(e.log_mgf(one(0.5)) == doctest::Approx(-0.5 - std::log(0.5)).epsilon(1e-14));
    const double q = std::log(gk([](double x) { return std::exp(0.5 * x - (x + 1.0)); }, -1.0, 80.0));
    CHECK(e.log_mgf(one(0.5)) == doctest::Approx(q).epsilon(1e-12));
    CHECK(e.log_mgf(one(1.0)) == kInf);
    CHECK(e.log_mgf(vec({0.2, 1.5}).head(1)) == doctest::Approx(-0.2 - std::log(0.8)));
  }

  TEST_CASE("atomic measures are rejected") {
    try {
      LaplaceOracle o(Measure::make(MeasureKind::kDiscreteCube, 2));
      FAIL("expected an error");
    } catch (const Error& err) {
      CHECK(err.code() == Errc::kUndefinedForAtomic);
    }
  }

  TEST_CASE("quadrature mode agrees with closed forms") {
    for (MeasureKind kind : {MeasureKind::kUniformCube, MeasureKind::kProductExponentialCentered,
                             MeasureKind::kGaussianStandard, MeasureKind::kUniformCubeUnitVolume}) {
      const Measure m = Measure::make(kind, 3);
      const LaplaceOracle a(m, LaplaceMode::kAnalytic), q(m, LaplaceMode::kQuadrature1D);
      Rng rng({31, 0});
      for (int i = 0; i < 20; ++i) {
        const Vector u = 0.9 * rng.unit_vector(3) * rng.uniform();
        INFO(kind_name(kind));
        CHECK(q.log_mgf(u) == doctest::Approx(a.log_mgf(u)).epsilon(1e-9));
        CHECK((q.gradient(u) - a.gradient(u)).norm() < 1e-7);
      }
    }
  }

  TEST_CASE("uniform ball transform against the marginal oracle") {
    for (int n : {2, 3, 5}) {
      const LaplaceOracle b(Measure::make(MeasureKind::kUniformBall, n));
      for (double u : {1e-3, 0.5, 3.0, 40.0, 350.0, 600.0}) {
        Vector v = Vector::Zero(n);
        v[0] = u;
        INFO("n=", n, " u=", u);
        CHECK(b.log_mgf(v) == doctest::Approx(ball_log_mgf_oracle(n, u)).epsilon(1e-9));
      }
    }
  }

  TEST_CASE("uniform simplex transform against direct integration") {
    // n = 1: uniform on [-1/2, 1/2].
    const LaplaceOracle s1(Measure::make(MeasureKind::kUniformSimplex, 1));
    CHECK(s1.log_mgf(one(3.0)) == doctest::Approx(numeric::log_sinhc(1.5)).epsilon(1e-12));
    // n = 2: iterated quadrature over the triangle conv{0, e1, e2} - 1/3.
    const LaplaceOracle s2(Measure::make(MeasureKind::kUniformSimplex, 2));
    for (const Vector& u : {vec({1.0, -2.0}), vec({3.0, 3.0}), vec({-4.0, 0.5}), vec({2.0, 2.0 + 1e-9})}) {
      // Inner integral in closed form: int_0^{1-a} e^{u1 b} db.
      const auto inner_b = [&](double a) {
        const double top = 1.0 - a;
        return std::fabs(u[1]) < 1e-12 ? top : std::expm1(u[1] * top) / u[1];
      };
      const double inner = gk([&](double a) { return 2.0 * std::exp(u[0] * (a - 1.0 / 3) - u[1] / 3) * inner_b(a); }, 0.0, 1.0);
      CHECK(s2.log_mgf(u) == doctest::Approx(std::log(inner)).epsilon(1e-10));
    }
  }

  TEST_CASE("monte-carlo mode") {
    const LaplaceOracle mc(Measure::make(MeasureKind::kGaussianStandard, 2), LaplaceMode::kMonteCarlo, 200000);
    const LaplaceValue v = mc.log_mgf_with_error(vec({0.5, 0.5}));
    CHECK(std::fabs(v.value - 0.25) <= 4.0 * v.std_error);
    CHECK_FALSE(v.unreliable);
    CHECK((mc.gradient(vec({0.5, 0.5})) - vec({0.5, 0.5})).norm() < 0.03);
    CHECK(mc.log_mgf(Vector::Zero(2)) == 0.0);
    // Heavy tilts are flagged.
    CHECK(mc.log_mgf_with_error(vec({6.0, 0.0})).unreliable);
  }

  TEST_CASE("Lambda(0) = 0, gradient at 0 is the mean, midpoint convexity") {
    for (MeasureKind kind : catalog_kinds()) {
      const Measure m = Measure::make(kind, 3);
      if (m.atomic()) continue;
      const LaplaceOracle o(m);
      INFO(kind_name(kind));
      CHECK(o.log_mgf(Vector::Zero(3)) == 0.0);
      CHECK(o.gradient(Vector::Zero(3)).norm() < 1e-6);
      Rng rng({41, 0});
      int violations = 0;
      for (int i = 0; i < 1000; ++i) {
        const Vector a = 0.95 * rng.unit_vector(3) * rng.uniform() * 3.0;
        const Vector b = 0.95 * rng.unit_vector(3) * rng.uniform() * 3.0;
        Vector aa = a, bb = b;
        if (kind == MeasureKind::kProductExponentialCentered) {
          aa = aa.cwiseMin(0.9);
          bb = bb.cwiseMin(0.9);
        }
        const double mid = o.log_mgf(0.5 * (aa + bb));
        if (mid > 0.5 * (o.log_mgf(aa) + o.log_mgf(bb)) + 1e-10) ++violations;
      }
      CHECK(violations == 0);
    }
  }

  TEST_CASE("cramer examples") {
    const LaplaceOracle g(Measure::make(MeasureKind::kGaussianStandard, 3));
    const CramerValue a = cramer(g, vec({1.0, 0.0, 0.0}));
    CHECK(a.value == doctest::Approx(0.5).epsilon(1e-12));
    CHECK((a.maximizer - vec({1.0, 0.0, 0.0})).norm() < 1e-8);
    CHECK(a.converged);
    const LaplaceOracle e(Measure::make(MeasureKind::kProductExponentialCentered, 1));
    CHECK(cramer(e, one(1.0)).value == doctest::Approx(1.0 - std::log(2.0)).epsilon(1e-10));
    for (MeasureKind kind : catalog_kinds()) {
      const Measure m = Measure::make(kind, 2);
      if (m.atomic()) continue;
      CHECK(cramer(LaplaceOracle(m), Vector::Zero(2)).value == 0.0);
    }
  }

  TEST_CASE("cramer values are certificates") {
    Rng rng({5, 0});
    for (MeasureKind kind : catalog_kinds()) {
      const Measure m = Measure::make(kind, 3);
      if (m.atomic()) continue;
      const LaplaceOracle o(m);
      for (int i = 0; i < 30; ++i) {
        const Vector v = m.draw(rng);
        const CramerValue c = cramer(o, v);
        INFO(kind_name(kind));
        REQUIRE(std::isfinite(c.value));
        CHECK(c.value >= 0.0);
        CHECK(c.value == doctest::Approx(v.dot(c.maximizer) - o.log_mgf(c.maximizer)).epsilon(1e-12));
        CHECK(c.converged);
      }
    }
  }

  TEST_CASE("cramer against one-dimensional conjugate oracles") {
    const LaplaceOracle c(Measure::make(MeasureKind::kUniformCube, 1));
    const auto cube = [](double u) { return numeric::log_sinhc(u); };
    for (double v : {0.1, 0.5, 0.9, 0.99}) {
      CHECK(cramer(c, one(v)).value == doctest::Approx(conjugate_oracle(cube, v, -10.0, 200.0)).epsilon(1e-7));
    }
    const LaplaceOracle e(Measure::make(MeasureKind::kProductExponentialCentered, 1));
    for (double v : {-0.9, -0.5, 0.3, 2.0, 7.0}) {
      CHECK(cramer(e, one(v)).value == doctest::Approx(v - std::log1p(v)).epsilon(1e-9));
    }
  }

  TEST_CASE("cramer outside the support diverges with a certificate") {
    const LaplaceOracle e(Measure::make(MeasureKind::kProductExponentialCentered, 1));
    const CramerValue out = cramer(e, one(-1.5));
    CHECK(out.infinite);
    CHECK(out.value == kInf);
    CHECK(out.certificate[0] == doctest::Approx(-1.0));
    const LaplaceOracle c(Measure::make(MeasureKind::kUniformCube, 2));
    const CramerValue corner = cramer(c, vec({1.0, 1.0}));
    CHECK(corner.infinite);
  }

  TEST_CASE("gaussian cramer exactness in closed form mode") {
    Rng rng({2024, 0});
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const int n = 1 + static_cast<int>(rng.below(10));
      const LaplaceOracle g(Measure::make(MeasureKind::kGaussianStandard, n), LaplaceMode::kAnalytic);
      const Vector v = rng.unit_vector(n) * 5.0 * rng.uniform();
      worst = std::max(worst, std::fabs(cramer(g, v).value - 0.5 * v.squaredNorm()));
    }
    CHECK(worst <= 1e-6);
  }

  TEST_CASE("bt_radial") {
    const LaplaceOracle g(Measure::make(MeasureKind::kGaussianStandard, 3));
    const RadialValue r = bt_radial(g, vec({0.0, 1.0, 0.0}), 2.0);
    CHECK(r.radius == doctest::Approx(2.0).epsilon(1e-8));
    CHECK_FALSE(r.unbounded);
    CHECK(bt_radial(g, vec({0.0, 1.0, 0.0}), 1e-6).radius < 2e-3);
    const LaplaceOracle e(Measure::make(MeasureKind::kProductExponentialCentered, 1));
    for (double t : {0.5, 3.0, 20.0}) CHECK(bt_radial(e, one(-1.0), t).radius <= 1.0);
    // Lambda*(v) = v - ln(1 + v) = 3 on the positive side.
    const double rho = bt_radial(e, one(1.0), 3.0).radius;
    CHECK(rho - std::log1p(rho) == doctest::Approx(3.0).epsilon(1e-7));
  }

  TEST_CASE("bt nesting") {
    const LaplaceOracle g(Measure::make(MeasureKind::kGaussianStandard, 2));
    const NestingReport a = bt_nesting_check(g, vec({1.0, 0.0}), 1.0, 4.0);
    CHECK(a.rho_t == doctest::Approx(std::sqrt(2.0)).epsilon(1e-7));
    CHECK(a.rho_s == doctest::Approx(std::sqrt(8.0)).epsilon(1e-7));
    CHECK(a.passed);
    const NestingReport b = bt_nesting_check(g, vec({0.6, 0.8}), 2.0, 2.0);
    CHECK(b.rho_t == b.rho_s);
    CHECK(b.passed);
    const LaplaceOracle e(Measure::make(MeasureKind::kProductExponentialCentered, 1));
    const NestingReport c = bt_nesting_check(e, one(1.0), 1.0, 2.0);
    CHECK(c.passed);
    CHECK(c.rho_s < 2.0 * c.rho_t * 0.99);
    Rng rng({8, 0});
    for (MeasureKind kind : catalog_kinds()) {
      const Measure m = Measure::make(kind, 2);
      if (m.atomic()) continue;
      const LaplaceOracle o(m);
      for (int i = 0; i < 50; ++i) {
        const double t = 0.1 + 5.0 * rng.uniform();
        const double s = t * (1.0 + 3.0 * rng.uniform());
        CHECK(bt_nesting_check(o, rng.unit_vector(2), t, s).passed);
      }
    }
  }

  TEST_CASE("M_t membership and regularity") {
    const MomentEvaluator g(Measure::make(MeasureKind::kGaussianStandard, 2));
    CHECK(mt_membership(g, vec({0.9, 0.0}), 2.0));
    CHECK_FALSE(mt_membership(g, vec({1.1, 0.0}), 2.0));
    const RegularityReport r = regularity_ratio(g, vec({0.0, 1.0}), 4.0, 2.0);
    CHECK(r.ratio == doctest::Approx(std::pow(3.0, 0.25)).epsilon(1e-12));
    CHECK(r.bound == 4.0);
    CHECK(r.passed);
    CHECK(regularity_ratio(g, vec({0.0, 1.0}), 3.0, 3.0).ratio == 1.0);
    const MomentEvaluator c(Measure::make(MeasureKind::kUniformCube, 1));
    const double oracle = std::pow(1.0 / 7.0, 1.0 / 6.0) / std::sqrt(1.0 / 3.0);
    CHECK(regularity_ratio(c, one(1.0), 6.0, 2.0).ratio == doctest::Approx(oracle).epsilon(1e-9));
    CHECK(oracle == doctest::Approx(1.2523074206).epsilon(1e-9));
  }

  TEST_CASE("B_t inside 4 e alpha Z_t") {
    const Measure gm = Measure::make(MeasureKind::kGaussianStandard, 2);
    const LaplaceOracle g(gm);
    const CentroidOracle z2(MomentEvaluator(gm), 2.0);
    const DirectionNet net = direction_net(2, 64, {1, 0});
    const BtInZtReport r = bt_in_zt_check(g, z2, net, net, 1.0);
    CHECK(r.max_gauge == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(r.passed);
    const BtInZtReport single = bt_in_zt_check(g, z2, {vec({1.0, 0.0})}, net, 1.0);
    CHECK(single.directions == 1);

    const Measure em = Measure::make(MeasureKind::kProductExponentialCentered, 1);
    const MomentEvaluator moments(em);
    const double alpha = measure_alpha(moments, {one(1.0), one(-1.0)}, {2.0, 4.0, 8.0});
    CHECK(alpha >= 1.0);
    const BtInZtReport e = bt_in_zt_check(LaplaceOracle(em), CentroidOracle(moments, 4.0), {one(1.0), one(-1.0)},
                                          {one(1.0), one(-1.0)}, alpha);
    CHECK(e.passed);
    CHECK(e.max_gauge <= 4.0 * std::numbers::e * alpha);
  }
}
