#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "doctest.h"
#include "depthlab/centroid.hpp"
#include "depthlab/numeric.hpp"

using namespace depthlab;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double a : v) x[i++] = a;
  return x;
}

Vector one(double a) { return Vector::Constant(1, a); }

}  // namespace

TEST_SUITE("centroid-bodies") {
  TEST_CASE("support examples") {
    const MomentEvaluator g(Measure::make(MeasureKind::kGaussianStandard, 3));
    CHECK(g.route() == MomentRoute::kClosedForm);
    CHECK(zt_support(CentroidOracle(g, 2.0), vec({0.0, 0.6, 0.8})).value == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(zt_support(CentroidOracle(g, 4.0), vec({1.0, 0.0, 0.0})).value ==
          doctest::Approx(std::pow(3.0, 0.25)).epsilon(1e-14));
    const MomentEvaluator c(Measure::make(MeasureKind::kUniformCube, 1));
    CHECK(c.route() == MomentRoute::kQuadrature);
    CHECK(zt_support(CentroidOracle(c, 2.0), one(1.0)).value == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-10));
  }

  TEST_CASE("one-dimensional quadrature moments") {
    const MomentEvaluator e(Measure::make(MeasureKind::kProductExponentialCentered, 1));
    for (double p : {1.0, 2.5, 6.0}) {
      const double plus = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
          [p](double x) { return std::pow(x, p) * std::exp(-(x + 1.0)); }, 0.0, 200.0, 20, 1e-14);
      const double minus = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
          [p](double x) { return std::pow(x, p) * std::exp(-(1.0 - x)); }, 0.0, 1.0, 20, 1e-14);
      CHECK(e.positive(one(1.0), p).value == doctest::Approx(plus).epsilon(1e-9));
      CHECK(e.positive(one(-1.0), p).value == doctest::Approx(minus).epsilon(1e-9));
      CHECK(e.absolute(one(1.0), p).value == doctest::Approx(plus + minus).epsilon(1e-9));
    }
  }

  TEST_CASE("uniform ball closed form against Monte-Carlo") {
    const Measure b = Measure::make(MeasureKind::kUniformBall, 3);
    const MomentEvaluator closed(b);
    CHECK(closed.route() == MomentRoute::kClosedForm);
    const PointSet pts = b.sample({6, 0}, 400000);
    const double mc = (pts.row(0).array().abs().pow(3.0)).mean();
    CHECK(closed.absolute(vec({1.0, 0.0, 0.0}), 3.0).value == doctest::Approx(mc).epsilon(0.01));
    // E x_1^2 = 1 / (n + 2).
    CHECK(closed.absolute(vec({0.0, 0.0, 1.0}), 2.0).value == doctest::Approx(0.2).epsilon(1e-13));
  }

  TEST_CASE("even halving") {
    const Measure g = Measure::make(MeasureKind::kGaussianStandard, 2);
    const HalvingReport a = even_halving_check(MomentEvaluator(g), 2.0, direction_net(2, 16, {1, 0}));
    CHECK(a.expected == doctest::Approx(std::sqrt(0.5)));
    CHECK(a.min_ratio == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
    CHECK(a.passed);
    CHECK(even_halving_check(MomentEvaluator(g), 1.0, direction_net(2, 8, {1, 0})).expected == 0.5);
    const HalvingReport c = even_halving_check(MomentEvaluator(Measure::make(MeasureKind::kUniformCube, 2)), 4.0,
                                               direction_net(2, 20, {1, 0}));
    CHECK(c.expected == doctest::Approx(std::pow(2.0, -0.25)));
    CHECK(c.passed);
    try {
      (void)even_halving_check(MomentEvaluator(Measure::make(MeasureKind::kUniformSimplex, 2)), 2.0,
                               direction_net(2, 4, {1, 0}));
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::kNotApplicable);
    }
  }

  TEST_CASE("one-sided inclusion chain") {
    const MomentEvaluator g(Measure::make(MeasureKind::kGaussianStandard, 2));
    const PlusInclusionReport a = zt_plus_inclusion_check(g, 2.0, 4.0, direction_net(2, 16, {1, 0}));
    CHECK(a.left_factor == doctest::Approx(std::pow(4.0 / std::numbers::e, 0.25)));
    // h+_4 / h+_2 = (3/2)^{1/4} / (1/2)^{1/2}
    CHECK(a.min_left_slack * a.left_factor == doctest::Approx(std::pow(1.5, 0.25) / std::sqrt(0.5)).epsilon(1e-12));
    CHECK(a.left_ok);
    CHECK(a.passed);
    const PlusInclusionReport near = zt_plus_inclusion_check(g, 2.0, 2.0 + 1e-9, direction_net(2, 4, {1, 0}));
    CHECK(near.left_factor == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(near.right_factor == doctest::Approx(1.0).epsilon(1e-8));
    const MomentEvaluator e(Measure::make(MeasureKind::kProductExponentialCentered, 1));
    CHECK(zt_plus_inclusion_check(e, 2.0, 6.0, {one(1.0), one(-1.0)}).passed);
  }

  TEST_CASE("Paley-Zygmund moment ratio") {
    const MomentEvaluator g(Measure::make(MeasureKind::kGaussianStandard, 2));
    const PzMomentReport a = pz_moment_check(g, vec({1.0, 0.0}), 1.0);
    CHECK(a.ratio == doctest::Approx(std::sqrt(0.5) * std::sqrt(2.0 * std::numbers::pi)).epsilon(1e-12));
    CHECK(a.ratio == doctest::Approx(1.7724538509).epsilon(1e-9));
    CHECK(a.passed);
    const MomentEvaluator c(Measure::make(MeasureKind::kUniformCube, 1));
    const PzMomentReport b = pz_moment_check(c, one(1.0), 2.0);
    CHECK(b.ratio == doctest::Approx(std::pow(0.1, 0.25) / std::sqrt(1.0 / 6.0)).epsilon(1e-9));
    CHECK_THROWS_AS((void)pz_moment_check(c, one(1.0), 0.5), Error);
  }

  TEST_CASE("volume radius") {
    const MomentEvaluator g2(Measure::make(MeasureKind::kGaussianStandard, 2));
    const VolumeRadiusReport a = zt_volume_radius(CentroidOracle(g2, 2.0));
    CHECK(a.computed);
    CHECK(a.value == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-4));
    CHECK(a.passed);
    const MomentEvaluator g3(Measure::make(MeasureKind::kGaussianStandard, 3));
    const VolumeRadiusReport b = zt_volume_radius(CentroidOracle(g3, 3.0));
    const double radius = std::cbrt(2.0 * std::sqrt(2.0 / std::numbers::pi));
    CHECK(radius == doctest::Approx(1.16858).epsilon(1e-5));
    CHECK(b.value == doctest::Approx(radius * std::cbrt(4.0 * std::numbers::pi / 3.0)).epsilon(2e-3));
    const MomentEvaluator c3(Measure::make(MeasureKind::kUniformCube, 3));
    // Isotropic rescaling of the cube: covariance I/3, so use sqrt(3) [-1,1]^3.
    const Measure iso = Measure::make(MeasureKind::kUniformCube, 3).affine_image(std::sqrt(3.0) * Matrix::Identity(3, 3),
                                                                                 Vector::Zero(3));
    const VolumeRadiusReport d = zt_volume_radius(CentroidOracle(MomentEvaluator(iso), 2.0));
    CHECK(d.value == doctest::Approx(std::cbrt(numeric::ball_volume(3))).epsilon(0.02));
    const VolumeRadiusReport big = zt_volume_radius(CentroidOracle(MomentEvaluator(Measure::make(MeasureKind::kGaussianStandard, 7)), 2.0));
    CHECK_FALSE(big.computed);
  }

  TEST_CASE("support function invariants") {
    Rng rng({17, 0});
    for (MeasureKind kind : catalog_kinds()) {
      const Measure m = Measure::make(kind, 3);
      const MomentEvaluator moments(m, 50000);
      INFO(kind_name(kind));
      for (int i = 0; i < 10; ++i) {
        const Vector y = rng.unit_vector(3);
        const double t = 1.0 + 4.0 * rng.uniform();
        const double s = t + 3.0 * rng.uniform();
        const CentroidOracle zt(moments, t), zs(moments, s), plus(moments, t, true);
        const double h = zt.support(y);
        for (double lambda : {0.5, 2.0, 10.0}) CHECK(std::fabs(zt.support(lambda * y) - lambda * h) <= 1e-10 * lambda * h);
        CHECK(zt.support(-y) == doctest::Approx(h).epsilon(m.traits().even ? 1e-12 : 1.0));
        CHECK(h <= zs.support(y) * (1.0 + 1e-12));
        CHECK(plus.support(y) <= h * (1.0 + 1e-12));
      }
    }
  }
}
