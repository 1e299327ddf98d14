#include <doctest.h>

#include "gnc/analysis.hpp"
#include "test_util.hpp"

using namespace gnc;

TEST_CASE("gamma_upper basics") {
  CHECK(gamma_upper(1, 0.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(gamma_upper(1, 2.5) == doctest::Approx(std::exp(-2.5)).epsilon(1e-13));
  CHECK(gamma_upper(25, 0.0) == doctest::Approx(std::tgamma(25.0)).epsilon(1e-14));
  CHECK(gamma_upper(2, 1.0) == doctest::Approx(2.0 / std::exp(1.0)).epsilon(1e-13));
  CHECK_THROWS_AS(gamma_upper(0, 1.0), std::domain_error);
  CHECK_THROWS_AS(gamma_upper(2, -1.0), std::domain_error);
}

TEST_CASE("gamma_upper over (alpha-1)! is the Poisson CDF") {
  for (int alpha : {1, 2, 5, 20, 25, 60, 75, 100}) {
    const double fact = std::tgamma(static_cast<double>(alpha));
    for (double x : {0.05, 0.7, 3.0, 12.0, 31.0, 55.0, 90.0}) {
      const double mine = gamma_upper(alpha, x) / fact;
      const double oracle = gnc_test::poisson_cdf(x, alpha - 1);
      CHECK(std::abs(mine - oracle) < 1e-10);
    }
  }
}

TEST_CASE("gamma_upper is decreasing, strictly so once below the double-precision plateau") {
  // For large alpha and tiny x the Poisson tail beyond alpha-1 is far below
  // one ulp, so consecutive values tie at exactly (alpha-1)!.
  for (int alpha : {2, 25, 75}) {
    const double fact = std::tgamma(static_cast<double>(alpha));
    double prev = gamma_upper(alpha, 0.0);
    bool below_plateau = false;
    for (double x = 0.5; x < 3.0 * alpha; x += 0.5) {
      const double v = gamma_upper(alpha, x);
      if (below_plateau) {
        CHECK(v < prev);
      } else {
        CHECK(v <= fact * (1.0 + 1e-12));
        if (v < fact * (1.0 - 1e-12)) {
          below_plateau = true;
          CHECK(v < prev);
        }
      }
      prev = v;
    }
    CHECK(below_plateau);
  }
}

TEST_CASE("gamma_inv") {
  SUBCASE("analytic inverse at alpha = 1") {
    CHECK(gamma_inv(1, 0.5) == doctest::Approx(std::log(2.0)).epsilon(1e-10));
  }
  SUBCASE("the top of the range maps to zero") {
    for (int alpha : {1, 2, 25, 75})
      CHECK(gamma_inv(alpha, std::tgamma(static_cast<double>(alpha))) == 0.0);
  }
  SUBCASE("round trips where the forward value is representable") {
    for (int alpha : {2, 25, 75}) {
      const double fact = std::tgamma(static_cast<double>(alpha));
      for (double x : {0.1, 1.0, 10.0, 30.0}) {
        const double y = gamma_upper(alpha, x);
        // skip points where the Poisson tail beyond alpha-1 is below the
        // double-precision noise floor: the forward value carries no usable
        // information about x there and no inverse can recover it
        if (y >= fact * (1.0 - 1e-7)) continue;
        CHECK(gamma_inv(alpha, y) == doctest::Approx(x).epsilon(1e-8));
      }
    }
  }
  SUBCASE("value-space tolerance holds everywhere") {
    for (int alpha : {2, 25, 75}) {
      const double fact = std::tgamma(static_cast<double>(alpha));
      for (double frac : {0.9999, 0.9, 0.5, 0.1, 1e-6}) {
        const double y = frac * fact;
        const double x = gamma_inv(alpha, y);
        CHECK(std::abs(gamma_upper(alpha, x) - y) <= 1e-9 * fact);
      }
    }
  }
  SUBCASE("domain errors") {
    CHECK_THROWS_AS(gamma_inv(2, 0.0), std::domain_error);
    CHECK_THROWS_AS(gamma_inv(2, -1.0), std::domain_error);
    CHECK_THROWS_AS(gamma_inv(2, 1.1), std::domain_error);  // above (alpha-1)! = 1
  }
}

TEST_CASE("fp_map") {
  SUBCASE("fp_map(0) equals x0 because P'(0) = 0") {
    auto p = make_asymptotic_params(25, 0.9, 0.02, DegreeDistribution::single(2), 20.0);
    CHECK(fp_map(0.0, p) == doctest::Approx(p.x0).epsilon(1e-12));
  }
  SUBCASE("huge intensity pushes the map to one") {
    auto p = make_asymptotic_params(25, 0.9, 0.02, DegreeDistribution::single(2), 200.0);
    CHECK(fp_map(0.5, p) == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("matches the Poisson complement oracle") {
    auto p = make_asymptotic_params(25, 0.9, 0.02, DegreeDistribution::single(2), 23.0);
    // P'(0.5) = 1 for p2 = 1, so the intensity is 23 + 25 * 0.1 * 1 = 25.5
    const double expect = 1.0 - gnc_test::poisson_cdf(25.5, 24);
    CHECK(fp_map(0.5, p) == doctest::Approx(expect).epsilon(1e-10));
  }
  SUBCASE("nondecreasing in x and in r0") {
    DegreeDistribution dist({{2, 0.6}, {5, 0.4}});
    auto p = make_asymptotic_params(25, 0.85, 0.03, dist, 21.0);
    double prev = fp_map(0.0, p);
    for (double x = 0.05; x <= 1.0; x += 0.05) {
      const double v = fp_map(x, p);
      CHECK(v >= prev);
      prev = v;
    }
    auto hi = make_asymptotic_params(25, 0.85, 0.03, dist, 22.0);
    for (double x = 0.0; x <= 1.0; x += 0.1) CHECK(fp_map(x, hi) >= fp_map(x, p));
  }
}

TEST_CASE("check_convergence") {
  DegreeDistribution p2 = DegreeDistribution::single(2);
  SUBCASE("r0 = 0 makes the interval invalid") {
    auto p = make_asymptotic_params(25, 0.99, 0.01, p2, 0.0);
    CHECK(p.x0 == doctest::Approx(0.0));
    CHECK_THROWS_AS(check_convergence(p, 1e-4), std::domain_error);
  }
  SUBCASE("direct-evaluation oracle at g = 25, R = 0.99, delta = 0.01") {
    // Huge intensity (r0 = 2g) is feasible for any distribution: x0 already
    // exceeds 1 - delta. Moderate intensity r0 = g is not enough: the map
    // value near x = 1 - delta stays far below x.
    CHECK(feasible_at_r0(p2, 25, 0.99, 0.01, 50.0, 1e-3));
    CHECK_FALSE(feasible_at_r0(p2, 25, 0.99, 0.01, 25.0, 1e-3));
    auto p = make_asymptotic_params(25, 0.99, 0.01, p2, 25.0);
    auto res = check_convergence(p, 1e-3);
    CHECK_FALSE(res.feasible);
    CHECK(res.margin < -1e-3);
    CHECK(std::isnan(res.epsilon));
    // the trajectory stalls well short of 1 - delta
    CHECK(res.trajectory.back() < 1.0 - 0.01);
  }
  SUBCASE("feasible case carries epsilon and a crossing trajectory") {
    // healthy margin: bisect the minimum and step well above it
    auto min = min_r0(p2, 25, 0.9, 0.03, 1e-3);
    REQUIRE(min.has_value());
    auto p = make_asymptotic_params(25, 0.9, 0.03, p2, min->r0 + 1.0);
    auto res = check_convergence(p, 1e-3);
    CHECK(res.feasible);
    CHECK(res.margin > 0.0);
    CHECK(res.epsilon == doctest::Approx(overhead_from_r0(p.r0, 25, 0.03, 0.9)).epsilon(1e-12));
    CHECK(res.trajectory.back() >= 1.0 - 0.03 - 1e-9);
    CHECK(res.trajectory.size() <= 10001);
  }
  SUBCASE("grid-step halving barely moves the margin") {
    auto min = min_r0(p2, 25, 0.9, 0.03, 1e-3);
    REQUIRE(min.has_value());
    auto p = make_asymptotic_params(25, 0.9, 0.03, p2, min->r0 + 0.5);
    const double m1 = check_convergence(p, 1e-4).margin;
    const double m2 = check_convergence(p, 5e-5).margin;
    CHECK(std::abs(m1 - m2) < 1e-6);
  }
}

TEST_CASE("min_r0") {
  DegreeDistribution p2 = DegreeDistribution::single(2);
  SUBCASE("epsilon follows the overhead formula") {
    CHECK(overhead_from_r0(23.2, 25, 0.02, 0.9) == doctest::Approx(0.052154).epsilon(1e-4));
    auto min = min_r0(p2, 25, 0.97, 0.04, 1e-3);
    REQUIRE(min.has_value());
    CHECK(min->epsilon ==
          doctest::Approx(overhead_from_r0(min->r0, 25, 0.04, 0.97)).epsilon(1e-12));
    CHECK(min->x0 ==
          doctest::Approx(1.0 - gamma_upper(25, min->r0) / std::tgamma(25.0)).epsilon(1e-12));
  }
  SUBCASE("grid refinement at half step moves the minimum only slightly") {
    auto coarse = min_r0(p2, 25, 0.97, 0.04, 1e-3);
    auto fine = min_r0(p2, 25, 0.97, 0.04, 5e-4);
    REQUIRE(coarse.has_value());
    REQUIRE(fine.has_value());
    CHECK(fine->r0 >= coarse->r0 - 1e-3);  // finer grids are at least as strict
    CHECK(std::abs(fine->r0 - coarse->r0) < 5e-3);
  }
  SUBCASE("bisection endpoints behave") {
    auto min = min_r0(p2, 25, 0.9, 0.03, 1e-3);
    REQUIRE(min.has_value());
    CHECK(feasible_at_r0(p2, 25, 0.9, 0.03, min->r0 + 1e-3, 1e-3));
    CHECK_FALSE(feasible_at_r0(p2, 25, 0.9, 0.03, min->r0 - 1e-2, 1e-3));
  }
}
