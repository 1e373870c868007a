#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "pagefuse/stats.hpp"

using namespace pagefuse;

TEST_SUITE("stats") {

// Golden values frozen from an arbitrary-precision reference implementation.
TEST_CASE("welch golden values") {
  {
    WelchResult w = welch_t_test({1, 2, 3, 4, 5}, {2, 3, 4, 5, 6});
    CHECK(w.t == doctest::Approx(-1.0).epsilon(1e-9));
    CHECK(w.df == doctest::Approx(8.0).epsilon(1e-9));
    CHECK(w.p == doctest::Approx(0.346593507087).epsilon(1e-6));
  }
  {
    WelchResult w = welch_t_test({10.2, 9.8, 10.1, 10.4, 9.9},
                                 {8.0, 9.5, 9.1, 8.7, 9.3, 8.9, 9.0});
    CHECK(w.t == doctest::Approx(5.42346083002).epsilon(1e-6));
    CHECK(w.df == doctest::Approx(9.17317551432).epsilon(1e-6));
    CHECK(w.p == doctest::Approx(0.000393229752168).epsilon(1e-6));
  }
  {
    WelchResult w = welch_t_test({1, 2, 3}, {10, 20, 35, 50});
    CHECK(w.t == doctest::Approx(-3.05050950437).epsilon(1e-6));
    CHECK(w.df == doctest::Approx(3.02609327448).epsilon(1e-6));
    CHECK(w.p == doctest::Approx(0.0547844119185).epsilon(1e-6));
  }
}

TEST_CASE("welch identities") {
  // Identical multisets with nonzero variance: t = 0, p = 1.
  WelchResult same = welch_t_test({1, 2, 3, 4}, {1, 2, 3, 4});
  CHECK(same.t == doctest::Approx(0.0));
  CHECK(same.p == doctest::Approx(1.0));

  // Swap negates t and keeps p.
  WelchResult ab = welch_t_test({1, 2, 3, 4, 5}, {2, 3, 4, 5, 6});
  WelchResult ba = welch_t_test({2, 3, 4, 5, 6}, {1, 2, 3, 4, 5});
  CHECK(ab.t == doctest::Approx(-ba.t));
  CHECK(ab.p == doctest::Approx(ba.p).epsilon(1e-12));

  // Affine invariance of p under x -> a*x + b, a > 0.
  std::vector<double> a = {1.1, 2.3, 2.9, 4.2, 5.0}, b = {2.5, 3.1, 4.8, 5.3, 6.9};
  std::vector<double> a2, b2;
  for (double v : a) a2.push_back(3.7 * v + 11.0);
  for (double v : b) b2.push_back(3.7 * v + 11.0);
  WelchResult w1 = welch_t_test(a, b), w2 = welch_t_test(a2, b2);
  CHECK(std::abs(w1.p - w2.p) < 1e-9);
}

TEST_CASE("welch degenerate inputs rejected") {
  CHECK_THROWS_AS(welch_t_test({1.0}, {1, 2, 3}), std::runtime_error);
  CHECK_THROWS_AS(welch_t_test({1, 2}, {}), std::runtime_error);
  CHECK_THROWS_AS(welch_t_test({5, 5, 5}, {7, 7, 7}), std::runtime_error);  // both zero variance
}

TEST_CASE("student t cdf sanity") {
  CHECK(student_t_cdf(0.0, 10) == doctest::Approx(0.5));
  CHECK(student_t_cdf(100.0, 5) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(student_t_cdf(-1.0, 8) == doctest::Approx(1.0 - student_t_cdf(1.0, 8)).epsilon(1e-10));
}

TEST_CASE("star notation honors inclusive cutoffs") {
  CHECK(significance_stars(0.5) == "");
  CHECK(significance_stars(0.051) == "");
  CHECK(significance_stars(0.05) == "*");     // inclusive
  CHECK(significance_stars(0.03) == "*");
  CHECK(significance_stars(0.01) == "**");    // inclusive
  CHECK(significance_stars(0.002) == "**");
  CHECK(significance_stars(0.001) == "***");  // inclusive
  CHECK(significance_stars(0.0002) == "***");
  CHECK(significance_stars(0.0001) == "****");  // inclusive boundary
  CHECK(significance_stars(1e-9) == "****");
}

}  // TEST_SUITE
