#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "oracle_utils.hpp"
#include "truncmeta/special.hpp"

using namespace truncmeta;

TEST_CASE("standard normal cdf reference values") {
  CHECK(std_normal_cdf(0.0) == 0.5);
  // Frozen from the quadrature oracle (normal_cdf_quadrature).
  CHECK(std_normal_cdf(1.959964) == doctest::Approx(0.975).epsilon(1e-6));
  CHECK(std_normal_cdf(-1.644854) == doctest::Approx(0.05).epsilon(1e-5));
  for (double x : {-3.7, -1.2, -0.3, 0.4, 1.7, 2.9}) {
    CHECK(std::fabs(std_normal_cdf(x) - oracle::normal_cdf_quadrature(x)) < 1e-12);
  }
}

TEST_CASE("standard normal cdf symmetry and monotonicity") {
  double prev = -1.0;
  for (double x = -9.0; x <= 9.0; x += 0.25) {
    const double c = std_normal_cdf(x);
    CHECK(c >= prev);
    CHECK(c >= 0.0);
    CHECK(c <= 1.0);
    CHECK(std::fabs(std_normal_cdf(-x) - (1.0 - c)) < 1e-14);
    prev = c;
  }
  CHECK_THROWS_AS(std_normal_cdf(std::nan("")), std::domain_error);
  CHECK_THROWS_AS(std_normal_cdf(INFINITY), std::domain_error);
}

TEST_CASE("standard normal quantile") {
  CHECK(std_normal_quantile(0.5) == 0.0);
  CHECK(std_normal_quantile(0.025) == doctest::Approx(-1.959964).epsilon(1e-5));
  CHECK(std_normal_quantile(0.525) == doctest::Approx(0.062707).epsilon(1e-5));
  // quantile o cdf identity within 1e-10, including deep tails.
  for (double p : {1e-12, 1e-8, 1e-4, 0.01, 0.3, 0.5, 0.77, 0.99, 1.0 - 1e-8}) {
    CHECK(std::fabs(std_normal_cdf(std_normal_quantile(p)) - p) < 1e-10);
  }
  double prev = -INFINITY;
  for (double p = 0.001; p < 1.0; p += 0.001) {
    const double q = std_normal_quantile(p);
    CHECK(q > prev);
    prev = q;
  }
  CHECK_THROWS_AS(std_normal_quantile(0.0), std::domain_error);
  CHECK_THROWS_AS(std_normal_quantile(1.0), std::domain_error);
  CHECK_THROWS_AS(std_normal_quantile(-0.1), std::domain_error);
}

TEST_CASE("chi-square cdf") {
  CHECK(chi_square_cdf(0.0, 4) == 0.0);
  // Frozen from the closed form 1 - e^{-x/2}(1 + x/2) for df = 4.
  CHECK(chi_square_cdf(2.772589, 4) == doctest::Approx(0.4034265).epsilon(1e-6));
  CHECK(chi_square_cdf(11.982930, 4) == doctest::Approx(0.9825213).epsilon(1e-6));
  SUBCASE("df=2 closed form to 1e-12") {
    for (double x = 0.0; x <= 50.0; x += 0.5) {
      CHECK(std::fabs(chi_square_cdf(x, 2) - (1.0 - std::exp(-0.5 * x))) < 1e-12);
    }
  }
  SUBCASE("even fast path agrees with the generic incomplete gamma") {
    for (int df : {2, 4, 10, 20, 64}) {
      for (double x : {0.01, 0.5, 3.0, 9.5, 31.0, 80.0}) {
        CHECK(std::fabs(chi_square_cdf(x, df) - regularized_gamma_p(0.5 * df, 0.5 * x)) <
              1e-13);
        CHECK(std::fabs(chi_square_survival(x, df) -
                        regularized_gamma_q(0.5 * df, 0.5 * x)) < 1e-13);
      }
    }
  }
  CHECK_THROWS_AS(chi_square_cdf(-1.0, 4), std::domain_error);
  CHECK_THROWS_AS(chi_square_cdf(1.0, 0), std::domain_error);
  CHECK_THROWS_AS(chi_square_cdf(1.0, -3), std::domain_error);
}

TEST_CASE("chi-square quantile") {
  CHECK(chi_square_quantile(0.0, 6) == 0.0);
  CHECK(chi_square_quantile(0.5, 2) == doctest::Approx(1.386294).epsilon(1e-6));
  CHECK(chi_square_quantile(0.95, 4) == doctest::Approx(9.487729).epsilon(1e-5));
  for (int df : {1, 2, 3, 4, 7, 10, 20, 61}) {
    for (double p : {1e-6, 0.01, 0.2, 0.5, 0.8, 0.99, 1.0 - 1e-9}) {
      const double x = chi_square_quantile(p, df);
      CHECK(std::fabs(chi_square_cdf(x, df) - p) < 1e-9);
    }
  }
  CHECK_THROWS_AS(chi_square_quantile(1.0, 4), std::domain_error);
  CHECK_THROWS_AS(chi_square_quantile(-0.5, 4), std::domain_error);
}

TEST_CASE("cdf/quantile identity on a grid") {
  for (double x = 0.1; x <= 40.0; x += 0.7) {
    for (int df : {2, 6, 20}) {
      const double p = chi_square_cdf(x, df);
      if (p < 1.0 - 1e-12) {
        CHECK(std::fabs(chi_square_quantile(p, df) - x) < 1e-8 * std::max(1.0, x));
      }
    }
  }
  for (double x = -6.0; x <= 6.0; x += 0.37) {
    CHECK(std::fabs(std_normal_quantile(std_normal_cdf(x)) - x) < 1e-8);
  }
}

TEST_CASE("student t two-sided p-value") {
  CHECK(student_t_two_sided_p(0.0, 10) == 1.0);
  // df=1 is Cauchy: p = 1 - (2/pi) atan(|t|).
  CHECK(student_t_two_sided_p(1.0, 1) ==
        doctest::Approx(1.0 - 2.0 / 3.14159265358979323846 * std::atan(1.0)).epsilon(1e-10));
  // Frozen from the quadrature oracle; also inside the looser documented band.
  const double p = student_t_two_sided_p(2.0, 98);
  CHECK(p == doctest::Approx(0.0482678).epsilon(1e-5));
  CHECK(std::fabs(p - oracle::t_two_sided_quadrature(2.0, 98)) < 1e-8);
  CHECK(std::fabs(p - 0.048345) < 2e-4);
  for (double t : {0.3, 1.7, 4.2}) {
    for (double df : {3.0, 9.0, 98.0}) {
      CHECK(std::fabs(student_t_two_sided_p(t, df) -
                      oracle::t_two_sided_quadrature(t, df)) < 1e-8);
      // two-sided p is symmetric in t
      CHECK(student_t_two_sided_p(t, df) == student_t_two_sided_p(-t, df));
    }
  }
  CHECK_THROWS_AS(student_t_two_sided_p(std::nan(""), 10), std::domain_error);
  CHECK_THROWS_AS(student_t_two_sided_p(1.0, 0.0), std::domain_error);
}

TEST_CASE("erf/log_gamma sanity against libm") {
  for (double x = -5.0; x <= 5.0; x += 0.1) {
    CHECK(std::fabs(truncmeta::erf(x) - std::erf(x)) < 1e-13);
    CHECK(std::fabs(truncmeta::erfc(x) - std::erfc(x)) < 1e-13 * std::max(1.0, std::erfc(x)) + 1e-16);
  }
  for (double x : {0.5, 1.0, 2.5, 10.0, 100.5}) {
    CHECK(std::fabs(log_gamma(x) - std::lgamma(x)) < 1e-11 * std::max(1.0, std::fabs(std::lgamma(x))));
  }
  CHECK_THROWS_AS(log_gamma(0.0), std::domain_error);
}

TEST_CASE("regularized beta basics") {
  CHECK(regularized_beta(0.0, 2.0, 3.0) == 0.0);
  CHECK(regularized_beta(1.0, 2.0, 3.0) == 1.0);
  // I_x(1,1) = x.
  for (double x = 0.0; x <= 1.0; x += 0.125) {
    CHECK(std::fabs(regularized_beta(x, 1.0, 1.0) - x) < 1e-14);
  }
  CHECK_THROWS_AS(regularized_beta(1.5, 1.0, 1.0), std::domain_error);
  CHECK_THROWS_AS(regularized_beta(0.5, 0.0, 1.0), std::domain_error);
}
