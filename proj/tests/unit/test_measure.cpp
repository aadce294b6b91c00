#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "doctest.h"
#include "depthlab/measure.hpp"

using namespace depthlab;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double a : v) x[i++] = a;
  return x;
}

}  // namespace

TEST_SUITE("measure-core") {
  TEST_CASE("density examples") {
    CHECK(Measure::make(MeasureKind::kGaussianStandard, 1).density(vec({0.0})) ==
          doctest::Approx(1.0 / std::sqrt(2.0 * std::numbers::pi)).epsilon(1e-14));
    CHECK(Measure::make(MeasureKind::kUniformCube, 2).density(vec({0.0, 0.0})) == doctest::Approx(0.25));
    CHECK(Measure::make(MeasureKind::kProductExponentialCentered, 1).density(vec({-2.0})) == 0.0);
    CHECK(Measure::make(MeasureKind::kUniformCube, 2).log_density(vec({1.5, 0.0})) == -kInf);
  }

  TEST_CASE("density errors") {
    const Measure cube = Measure::make(MeasureKind::kDiscreteCube, 3);
    try {
      (void)cube.density(vec({1, 1, 1}));
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::kUndefinedForAtomic);
    }
    try {
      (void)Measure::make(MeasureKind::kGaussianStandard, 2).density(vec({1, 1, 1}));
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::kDimensionMismatch);
    }
  }

  TEST_CASE("one-dimensional densities integrate to one") {
    for (MeasureKind kind : catalog_kinds()) {
      const Measure m = Measure::make(kind, 1);
      if (m.atomic()) continue;
      const auto f = [&](double x) { return m.density(Vector::Constant(1, x)); };
      // Pieces keep the quadrature away from support kinks.
      double total = 0.0;
      const double cuts[] = {-40.0, -1.0, -0.5, 0.0, 0.5, 1.0, 40.0};
      for (int i = 0; i + 1 < 7; ++i) {
        total += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, cuts[i], cuts[i + 1], 15, 1e-13);
      }
      INFO(kind_name(kind));
      CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
    }
  }

  TEST_CASE("uniform simplex density integrates to one in the plane") {
    const Measure m = Measure::make(MeasureKind::kUniformSimplex, 2);
    // conv{0, e1, e2} shifted by -1/3: count a fine grid.
    const int k = 600;
    double total = 0.0;
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < k; ++j) {
        const Vector x = vec({-1.0 / 3 + (i + 0.5) / k, -1.0 / 3 + (j + 0.5) / k});
        total += m.density(x) / (static_cast<double>(k) * k);
      }
    }
    CHECK(total == doctest::Approx(1.0).epsilon(5e-3));
  }

  TEST_CASE("sampling moments") {
    const PointSet g = Measure::make(MeasureKind::kGaussianStandard, 5).sample({11, 0}, 100000);
    const Vector mean = g.rowwise().mean();
    for (Eigen::Index i = 0; i < 5; ++i) CHECK(std::fabs(mean[i]) <= 4.0 / std::sqrt(100000.0));

    const PointSet c = Measure::make(MeasureKind::kUniformCube, 3).sample({12, 0}, 100000);
    const Matrix cov = empirical_covariance(c);
    // Var U[-1,1] = int_{-1}^{1} x^2/2 dx
    const double var = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        [](double x) { return x * x / 2.0; }, -1.0, 1.0);
    for (Eigen::Index i = 0; i < 3; ++i) CHECK(cov(i, i) == doctest::Approx(var).epsilon(0.01));
  }

  TEST_CASE("sampling is deterministic per stream") {
    for (MeasureKind kind : catalog_kinds()) {
      const Measure m = Measure::make(kind, 3);
      const PointSet a = m.sample({7, 0}, 3);
      const PointSet b = m.sample({7, 0}, 3);
      const PointSet c = m.sample({7, 1}, 3);
      CHECK(a == b);
      CHECK(a != c);
    }
  }

  TEST_CASE("sampler supports") {
    const PointSet d = Measure::make(MeasureKind::kDiscreteCube, 10).sample({3, 0}, 100);
    CHECK((d.array().abs() == 1.0).all());
    const PointSet e = Measure::make(MeasureKind::kProductExponentialCentered, 4).sample({3, 0}, 1000);
    CHECK((e.array() >= -1.0).all());
    const PointSet b = Measure::make(MeasureKind::kUniformBall, 4).sample({3, 0}, 1000);
    CHECK((b.colwise().norm().array() <= 1.0).all());
    const PointSet s = Measure::make(MeasureKind::kUniformSimplex, 3).sample({3, 0}, 1000);
    CHECK((s.array() >= -0.25 - 1e-12).all());
    CHECK(((s.colwise().sum().array() + 0.75) <= 1.0 + 1e-12).all());
  }

  TEST_CASE("custom measure without sampler") {
    Measure::CustomSpec spec;
    spec.dimension = 2;
    spec.log_density = [](const Vector& x) { return -0.5 * x.squaredNorm() - std::log(2.0 * std::numbers::pi); };
    const Measure m = Measure::custom(spec);
    CHECK_FALSE(m.has_sampler());
    try {
      (void)m.sample({1, 0}, 4);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::kUnsupported);
    }
  }

  TEST_CASE("stats and the isotropic constant") {
    const MeasureStats g = stats(Measure::make(MeasureKind::kGaussianStandard, 3));
    CHECK(g.isotropic_constant == doctest::Approx(1.0 / std::sqrt(2.0 * std::numbers::pi)).epsilon(1e-12));
    const MeasureStats u = stats(Measure::make(MeasureKind::kUniformCubeUnitVolume, 4));
    CHECK(u.isotropic_constant == doctest::Approx(1.0 / std::sqrt(12.0)).epsilon(1e-12));
    const MeasureStats g2 = stats(Measure::make(MeasureKind::kGaussianStandard, 2));
    CHECK(g2.mean.norm() == 0.0);
    CHECK((g2.covariance - Matrix::Identity(2, 2)).norm() == 0.0);
    for (MeasureKind kind : catalog_kinds()) {
      if (kind == MeasureKind::kDiscreteCube) continue;
      const MeasureStats s = stats(Measure::make(kind, 3));
      const double det = s.covariance.determinant();
      CHECK(s.isotropic_constant ==
            doctest::Approx(std::pow(s.sup_density, 1.0 / 3) * std::pow(det, 1.0 / 6)).epsilon(1e-12));
      const Eigen::SelfAdjointEigenSolver<Matrix> eig(s.covariance);
      CHECK(eig.eigenvalues().minCoeff() > 0.0);
    }
  }

  TEST_CASE("empirical stats of a custom measure") {
    Measure::CustomSpec spec;
    spec.dimension = 2;
    spec.log_density = [](const Vector& x) { return -0.5 * x.squaredNorm() - std::log(2.0 * std::numbers::pi); };
    spec.sampler = [](Rng& rng) { return rng.normal_vector(2); };
    const Measure m = Measure::custom(spec);
    const PointSet pts = m.sample({5, 0}, 20000);
    const MeasureStats s = stats(m, &pts);
    CHECK(s.sup_is_lower_bound);
    CHECK(s.sup_density == doctest::Approx(1.0 / (2.0 * std::numbers::pi)).epsilon(1e-6));
    CHECK(s.sup_density <= 1.0 / (2.0 * std::numbers::pi) + 1e-15);

    PointSet flat(2, 50);
    flat.row(0).setLinSpaced(50, -1.0, 1.0);
    flat.row(1) = flat.row(0);
    try {
      (void)stats(m, &flat);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::kSingular);
    }
  }

  TEST_CASE("isotropize") {
    const PointSet g = Measure::make(MeasureKind::kGaussianStandard, 3).sample({21, 0}, 200000);
    const AffineMap t = isotropize(g);
    CHECK((t.a - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() < 0.02);
    CHECK(t.b.cwiseAbs().maxCoeff() < 0.02);

    PointSet shifted = g.leftCols(5000);
    shifted.array() += 5.0;
    const PointSet centered = isotropize(shifted).apply(shifted);
    CHECK(empirical_mean(centered).cwiseAbs().maxCoeff() < 1e-12);

    PointSet scaled = g.leftCols(5000);
    scaled.row(0) *= 2.0;
    const AffineMap w = isotropize(scaled);
    const PointSet white = w.apply(scaled);
    CHECK((empirical_covariance(white) - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-10);
    const AffineMap again = isotropize(white);
    CHECK((again.a - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(again.b.cwiseAbs().maxCoeff() < 1e-8);
  }

  TEST_CASE("Fradelizi checks") {
    const FradeliziReport g = fradelizi_checks(Measure::make(MeasureKind::kGaussianStandard, 3), {1, 0});
    CHECK(g.sup_ratio == doctest::Approx(1.0));
    CHECK(g.passed);
    const FradeliziReport e = fradelizi_checks(Measure::make(MeasureKind::kProductExponentialCentered, 1), {1, 0});
    CHECK(e.sup_ratio == doctest::Approx(std::numbers::e).epsilon(1e-12));
    CHECK(e.sup_bound == doctest::Approx(std::numbers::e).epsilon(1e-12));
    CHECK(e.passed);
    const FradeliziReport s = fradelizi_checks(Measure::make(MeasureKind::kUniformSimplex, 2), {2, 0});
    CHECK(s.sections_checked);
    CHECK(s.directions == 100);
    CHECK(s.section_ratio <= std::numbers::e);
    CHECK(s.passed);
    for (MeasureKind kind : catalog_kinds()) {
      const Measure m = Measure::make(kind, 2);
      if (m.atomic()) continue;
      CHECK(fradelizi_checks(m, {3, 0}).passed);
    }
  }

  TEST_CASE("midpoint log-concavity") {
    for (MeasureKind kind : catalog_kinds()) {
      for (int n : {1, 3}) {
        const Measure m = Measure::make(kind, n);
        if (m.atomic()) continue;
        INFO(kind_name(kind), " n=", n);
        CHECK(log_concavity_violations(m, {4, 0}, 1000) == 0);
      }
    }
  }

  TEST_CASE("kind names round trip") {
    for (MeasureKind kind : catalog_kinds()) CHECK(parse_measure_kind(kind_name(kind)) == kind);
    CHECK_FALSE(parse_measure_kind("gaussian"));
  }

  TEST_CASE("affine image") {
    Matrix a(2, 2);
    a << 2.0, 0.0, 1.0, 1.0;
    const Vector b = vec({1.0, -1.0});
    const Measure g = Measure::make(MeasureKind::kGaussianStandard, 2);
    const Measure h = g.affine_image(a, b);
    const Vector x = vec({0.3, -0.2});
    const Vector pre = a.inverse() * (x - b);
    CHECK(h.log_density(x) == doctest::Approx(g.log_density(pre) - std::log(2.0)).epsilon(1e-12));
    const Vector u = vec({0.2, 0.5});
    CHECK(h.analytic_log_mgf(u) == doctest::Approx(u.dot(b) + 0.5 * (a.transpose() * u).squaredNorm()));
    CHECK((*h.analytic_mean() - b).norm() < 1e-15);
  }
}
