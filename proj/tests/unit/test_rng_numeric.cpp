#include <cmath>
#include <numbers>
#include <set>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "doctest.h"
#include "depthlab/core.hpp"
#include "depthlab/numeric.hpp"
#include "depthlab/parallel.hpp"
#include "depthlab/rng.hpp"
#include "depthlab/sphere.hpp"

using namespace depthlab;

TEST_SUITE("plumbing") {
  TEST_CASE("rng streams are reproducible and distinct") {
    Rng a({7, 0}), b({7, 0}), c({7, 1}), d({8, 0});
    for (int i = 0; i < 100; ++i) {
      const auto x = a.next_u64();
      CHECK(x == b.next_u64());
      CHECK(x != c.next_u64());
      CHECK(x != d.next_u64());
    }
    std::set<std::uint64_t> seen;
    for (std::uint64_t i = 0; i < 1000; ++i) seen.insert(Rng(RngStream{1, 0}.child(i)).next_u64());
    CHECK(seen.size() == 1000);
  }

  TEST_CASE("rng distributions") {
    Rng rng({99, 0});
    const int count = 200000;
    double u_sum = 0.0, n_sum = 0.0, n_sq = 0.0, e_sum = 0.0;
    double lo = 1.0, hi = 0.0;
    for (int i = 0; i < count; ++i) {
      const double u = rng.uniform();
      lo = std::min(lo, u);
      hi = std::max(hi, u);
      u_sum += u;
      const double g = rng.normal();
      n_sum += g;
      n_sq += g * g;
      e_sum += rng.exponential();
    }
    CHECK(lo > 0.0);
    CHECK(hi < 1.0);
    CHECK(u_sum / count == doctest::Approx(0.5).epsilon(0.01));
    CHECK(std::fabs(n_sum / count) < 0.01);
    CHECK(n_sq / count == doctest::Approx(1.0).epsilon(0.01));
    CHECK(e_sum / count == doctest::Approx(1.0).epsilon(0.01));
    for (int i = 0; i < 1000; ++i) CHECK(rng.below(7) < 7);
    CHECK(rng.unit_vector(5).norm() == doctest::Approx(1.0).epsilon(1e-14));
  }

  TEST_CASE("estimates") {
    const double v[] = {1.0, 2.0, 3.0, 4.0};
    const Estimate e = mean_estimate(v, 4, 5);
    CHECK(e.value == 2.5);
    CHECK(e.std_error == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
    CHECK(e.ci_low == doctest::Approx(2.5 - 1.96 * e.std_error));
    CHECK(e.seed == 5);
    CHECK(pairwise_sum(v, 4) == 10.0);
  }

  TEST_CASE("quadrature and special functions") {
    CHECK(numeric::integrate([](double x) { return std::exp(-x); }, 0.0, 30.0) ==
          doctest::Approx(1.0 - std::exp(-30.0)).epsilon(1e-12));
    CHECK(numeric::normal_cdf(0.0) == 0.5);
    CHECK(numeric::normal_sf(1.0) == doctest::Approx(0.15865525393145707).epsilon(1e-14));
    CHECK(numeric::normal_sf(10.0) == doctest::Approx(7.619853024160527e-24).epsilon(1e-12));
    CHECK(numeric::ball_volume(2) == doctest::Approx(std::numbers::pi));
    CHECK(numeric::ball_volume(3) == doctest::Approx(4.0 * std::numbers::pi / 3.0));
    CHECK(numeric::sphere_area(3) == doctest::Approx(4.0 * std::numbers::pi));
    CHECK(numeric::gaussian_abs_moment(4.0) == doctest::Approx(3.0));
    CHECK(numeric::gaussian_abs_moment(3.0) == doctest::Approx(2.0 * std::sqrt(2.0 / std::numbers::pi)));
    CHECK(std::exp(numeric::log_binomial(2000, 2)) == doctest::Approx(1999000.0).epsilon(1e-10));
    for (double u : {1e-8, 0.3, 2.0, 50.0, 800.0}) {
      // Direct evaluation where it does not overflow.
      if (u < 700) CHECK(numeric::log_sinhc(u) == doctest::Approx(std::log(std::sinh(u) / u)).epsilon(1e-12));
      CHECK(numeric::log_sinhc(-u) == numeric::log_sinhc(u));
    }
    CHECK(numeric::log_sinhc(800.0) == doctest::Approx(800.0 - std::log(2.0) - std::log(800.0)).epsilon(1e-14));
    CHECK(numeric::langevin(2.0) == doctest::Approx(1.0 / std::tanh(2.0) - 0.5).epsilon(1e-13));
    CHECK(numeric::langevin(1e-9) == doctest::Approx(1e-9 / 3.0).epsilon(1e-6));
  }

  TEST_CASE("ray extent") {
    CHECK(numeric::ray_extent([](double r) { return -0.5 * r * r; }, -5.0) == doctest::Approx(std::sqrt(10.0)).epsilon(1e-14));
    CHECK(numeric::ray_extent([](double r) { return r < 2.5 ? 0.0 : -kInf; }, -80.0) == doctest::Approx(2.5).epsilon(1e-14));
    CHECK(numeric::ray_extent([](double) { return 0.0; }, -1.0) == kInf);
  }

  TEST_CASE("parallel_for results do not depend on worker count") {
    std::vector<double> a(1000), b(1000);
    parallel_for(1000, [&](std::size_t i) { a[i] = std::sin(static_cast<double>(i)); }, 1);
    parallel_for(1000, [&](std::size_t i) { b[i] = std::sin(static_cast<double>(i)); }, 4);
    CHECK(a == b);
    CHECK_THROWS_AS(parallel_for(10, [](std::size_t i) { if (i == 3) throw Error(Errc::kIo, "x"); }, 3), Error);
  }

  TEST_CASE("direction nets") {
    const DirectionNet two = direction_net(2, 8, {1, 0});
    CHECK(two.size() == 8);
    CHECK(two[2].isApprox(Vector::Unit(2, 1), 1e-15));
    const DirectionNet one = direction_net(1, 50, {1, 0});
    CHECK(one.size() == 2);
    for (const auto& d : direction_net(3, 100, {1, 0})) CHECK(d.norm() == doctest::Approx(1.0));
    for (const auto& d : direction_net(5, 100, {1, 0})) CHECK(d.norm() == doctest::Approx(1.0));
    const SupportTable ball = SupportTable::build(direction_net(2, 720, {1, 0}), [](const Vector& y) { return y.norm(); });
    Vector x(2);
    x << 0.6, 0.8;
    CHECK(ball.gauge(x) == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(ball.radial(x) == doctest::Approx(1.0).epsilon(1e-4));
    const auto box = [](const Vector& y) { return y.lpNorm<1>(); };  // support of [-1,1]^2
    CHECK(gauge_from_support(box, x, direction_net(2, 8, {1, 0})) == doctest::Approx(0.8).epsilon(1e-12));
  }
}
