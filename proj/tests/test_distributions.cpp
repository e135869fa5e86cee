#include <doctest.h>

#include <cmath>
#include <numbers>

#include "lmkit/distributions.hpp"
#include "lmkit/errors.hpp"
#include "support/oracles.hpp"

using namespace lmkit;

TEST_CASE("student t exact values") {
  for (double df : {1.0, 2.0, 5.0, 30.0, 200.0}) {
    CHECK(student_t_cdf(0.0, df) == doctest::Approx(0.5).epsilon(1e-14));
  }
  // Cauchy closed form: 1/2 + atan(t)/pi
  CHECK(student_t_cdf(1.0, 1.0) == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(student_t_cdf(-1.0, 1.0) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(student_t_cdf(2.0, 10.0) ==
        doctest::Approx(0.9633059826146297).epsilon(1e-12));
}

TEST_CASE("student t against the quadrature oracle") {
  for (double df : {1.0, 2.0, 3.0, 7.0, 10.0, 25.0, 120.0}) {
    for (double t : {-4.0, -1.3, -0.2, 0.4, 1.0, 2.0, 3.5}) {
      const double expected = oracle::t_cdf_by_quadrature(t, df);
      CHECK(student_t_cdf(t, df) == doctest::Approx(expected).epsilon(1e-9));
    }
  }
}

TEST_CASE("symmetry and two-sided tail") {
  for (double df : {1.0, 4.0, 60.0}) {
    for (double t : {0.3, 1.7, 2.9}) {
      CHECK(student_t_cdf(t, df) + student_t_cdf(-t, df) ==
            doctest::Approx(1.0).epsilon(1e-13));
      CHECK(student_t_two_sided_p(t, df) ==
            doctest::Approx(2.0 * (1.0 - student_t_cdf(t, df))).epsilon(1e-10));
    }
  }
  // far tails keep full precision through the incomplete beta
  CHECK(student_t_two_sided_p(30.0, 2000.0) > 0.0);
  CHECK(student_t_two_sided_p(30.0, 2000.0) < 1e-150);
}

TEST_CASE("t quantile inverts the cdf") {
  for (double df : {1.0, 2.0, 5.0, 12.0, 40.0, 2912.0}) {
    for (double x : {-3.0, -1.2, -0.4, 0.0, 0.7, 1.9607, 4.2}) {
      const double p = student_t_cdf(x, df);
      CHECK(t_quantile(p, df) == doctest::Approx(x).epsilon(1e-8));
    }
  }
  CHECK(t_quantile(0.975, 2912.0) ==
        doctest::Approx(1.9607789710772805).epsilon(1e-10));
  CHECK(t_quantile(0.5, 7.0) == 0.0);
}

TEST_CASE("f distribution") {
  CHECK(f_cdf(3.2, 4.0, 17.0) == doctest::Approx(0.9605974296353346).epsilon(1e-12));
  CHECK(f_cdf(0.0, 3.0, 9.0) == 0.0);
  for (double x : {0.3, 1.0, 2.7}) {
    CHECK(f_cdf(x, 3.0, 11.0) + f_sf(x, 3.0, 11.0) ==
          doctest::Approx(1.0).epsilon(1e-12));
  }
  // F(1, df) is the square of a t variate: P(F <= t^2) = 2 P(T <= |t|) - 1
  for (double df : {2.0, 9.0, 77.0}) {
    for (double t : {0.5, 1.3, 2.2}) {
      CHECK(f_cdf(t * t, 1.0, df) ==
            doctest::Approx(2.0 * student_t_cdf(t, df) - 1.0).epsilon(1e-11));
    }
  }
}

TEST_CASE("normal quantile") {
  CHECK(normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(normal_quantile(0.3) == doctest::Approx(-0.5244005127080409).epsilon(1e-10));
  CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-10));
  // round trip through erfc
  for (double p : {0.001, 0.12, 0.5, 0.77, 0.9995}) {
    const double x = normal_quantile(p);
    CHECK(0.5 * std::erfc(-x / std::numbers::sqrt2) ==
          doctest::Approx(p).epsilon(1e-11));
  }
}

TEST_CASE("domain errors") {
  CHECK_THROWS_AS(student_t_cdf(1.0, 0.5), Error);
  CHECK_THROWS_AS(t_quantile(0.0, 5.0), Error);
  CHECK_THROWS_AS(t_quantile(1.0, 5.0), Error);
  CHECK_THROWS_AS(f_cdf(1.0, 0.0, 5.0), Error);
  CHECK_THROWS_AS(normal_quantile(-0.1), Error);
  CHECK_THROWS_AS(regularized_incomplete_beta(1.0, 1.0, 1.5), Error);
}
