#include <doctest.h>

#include <cmath>
#include <initializer_list>

#include "sandwich/special_functions.hpp"

using namespace sandwich;

TEST_CASE("bessel_I matches reference values") {
  // Reference values frozen from an independent arbitrary-precision evaluation.
  CHECK(bessel_I(0, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(bessel_I(0, 0.5) == doctest::Approx(1.06348337074132352).epsilon(1e-14));
  CHECK(bessel_I(0, 1.0) == doctest::Approx(1.26606587775200834).epsilon(1e-14));
  CHECK(bessel_I(0, 2.0) == doctest::Approx(2.27958530233606727).epsilon(1e-14));
  CHECK(bessel_I(0, 5.0) == doctest::Approx(27.2398718236044469).epsilon(1e-13));
  CHECK(bessel_I(1, 0.0) == doctest::Approx(0.0));
  CHECK(bessel_I(1, 0.5) == doctest::Approx(0.257894305390896316).epsilon(1e-14));
  CHECK(bessel_I(1, 1.0) == doctest::Approx(0.565159103992485027).epsilon(1e-14));
  CHECK(bessel_I(1, 2.0) == doctest::Approx(1.59063685463732906).epsilon(1e-14));
  CHECK(bessel_I(1, 5.0) == doctest::Approx(24.3356421424505272).epsilon(1e-13));
}

TEST_CASE("bessel_i1_ratio is smooth through zero") {
  CHECK(bessel_i1_ratio(0.0) == doctest::Approx(1.0));
  // tiny arguments stay on the series value 1 + z^2/8 + ...
  CHECK(bessel_i1_ratio(1e-8) == doctest::Approx(1.0).epsilon(1e-14));
  // consistency with the direct definition away from zero
  for (double z : {0.3, 1.0, 2.5, 6.0}) {
    CHECK(bessel_i1_ratio(z) == doctest::Approx(2.0 * bessel_I(1, z) / z).epsilon(1e-13));
  }
}

TEST_CASE("pi_function boundary values") {
  // Pi(s1, 0) = e^{s1}, Pi(0, s2) = 1.
  for (double s : {0.0, 0.3, 1.0, 2.0}) {
    CHECK(pi_function(s, 0.0) == doctest::Approx(std::exp(s)).epsilon(1e-12));
    CHECK(pi_function(0.0, s) == doctest::Approx(1.0).epsilon(1e-12));
  }
  // near-zero first argument stays within 1e-10 of the limit value
  CHECK(std::abs(pi_function(1e-12, 0.7) - 1.0) < 1e-10);
}

TEST_CASE("pi_function interior value against frozen quadrature oracle") {
  // Independent 10^4-point Simpson evaluation of the defining integral.
  CHECK(pi_function(0.5, 0.5) == doctest::Approx(1.99217385310552679).epsilon(1e-11));
}

TEST_CASE("pi_function is monotone increasing in s1") {
  double prev = pi_function(0.0, 1.0);
  for (double s1 : {0.25, 0.5, 1.0, 2.0}) {
    const double v = pi_function(s1, 1.0);
    CHECK(v > prev);
    prev = v;
  }
}
