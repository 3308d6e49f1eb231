#include <doctest.h>

#include <cmath>

#include "sandwich/finite_difference.hpp"
#include "sandwich/quadrature.hpp"

using namespace sandwich;

namespace {
Eigen::VectorXd sample(int n, double a, double b, double (*f)(double)) {
  Eigen::VectorXd v(n + 1);
  for (int i = 0; i <= n; ++i) v(i) = f(a + (b - a) * i / n);
  return v;
}
}  // namespace

TEST_CASE("trapezoid is exact for linear data") {
  Eigen::VectorXd v(5);
  v << 0.0, 0.25, 0.5, 0.75, 1.0;  // f(x) = x on [0,1]
  CHECK(trapezoid(v, 0.25) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("trapezoid converges at second order on x^2") {
  auto sq = [](double x) { return x * x; };
  const double e1 = std::abs(trapezoid(sample(100, 0, 1, sq), 0.01) - 1.0 / 3.0);
  const double e2 = std::abs(trapezoid(sample(200, 0, 1, sq), 0.005) - 1.0 / 3.0);
  CHECK(e1 < 2e-5);
  CHECK(e2 < e1);
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("cumulative_trapezoid reproduces the running integral of a line") {
  std::vector<double> v(11);
  for (int i = 0; i <= 10; ++i) v[i] = 2.0 * (0.1 * i);  // f = 2x, integral x^2
  const auto c = cumulative_trapezoid(v, 0.1);
  CHECK(c[0] == 0.0);
  for (int i = 0; i <= 10; ++i) {
    const double x = 0.1 * i;
    CHECK(c[i] == doctest::Approx(x * x).epsilon(1e-14));
  }
}

TEST_CASE("simpson is exact for cubics on even and odd interval counts") {
  auto cube = [](double x) { return x * x * x - 2.0 * x; };
  // exact integral over [0,1]: 1/4 - 1
  const double exact = 0.25 - 1.0;
  CHECK(simpson(sample(10, 0, 1, cube), 0.1) == doctest::Approx(exact).epsilon(1e-14));
  // odd interval count exercises the 3/8 tail
  CHECK(simpson(sample(11, 0, 1, cube), 1.0 / 11.0) == doctest::Approx(exact).epsilon(1e-14));
  CHECK(simpson(sample(3, 0, 1, cube), 1.0 / 3.0) == doctest::Approx(exact).epsilon(1e-14));
}

TEST_CASE("adaptive_simpson hits tight tolerances on smooth integrands") {
  const double v = adaptive_simpson([](double x) { return std::exp(x); }, 0.0, 1.0, 1e-12);
  CHECK(v == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-12));
  const double s = adaptive_simpson([](double x) { return std::sin(x); }, 0.0, M_PI, 1e-12);
  CHECK(s == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("derivative_o4 is exact for quartics") {
  const int n = 20;
  const double h = 1.0 / n;
  Eigen::VectorXd f(n + 1);
  for (int i = 0; i <= n; ++i) {
    const double x = i * h;
    f(i) = x * x * x * x - 0.5 * x * x + 3.0 * x;
  }
  const Eigen::VectorXd d = derivative_o4(f, h);
  for (int i = 0; i <= n; ++i) {
    const double x = i * h;
    CHECK(d(i) == doctest::Approx(4.0 * x * x * x - x + 3.0).epsilon(1e-11));
  }
}

TEST_CASE("second_derivative_o4 is exact for quartics") {
  const int n = 20;
  const double h = 1.0 / n;
  Eigen::VectorXd f(n + 1);
  for (int i = 0; i <= n; ++i) {
    const double x = i * h;
    f(i) = x * x * x * x + 2.0 * x * x - x;
  }
  const Eigen::VectorXd d = second_derivative_o4(f, h);
  for (int i = 0; i <= n; ++i) {
    const double x = i * h;
    CHECK(d(i) == doctest::Approx(12.0 * x * x + 4.0).epsilon(1e-9));
  }
}

TEST_CASE("one-sided boundary stencils match low-degree polynomials") {
  const int n = 10;
  const double h = 0.1;
  Eigen::VectorXd f(n + 1);
  for (int i = 0; i <= n; ++i) {
    const double x = i * h;
    f(i) = x * x * x - x * x + 2.0;  // f' = 3x^2-2x, f'' = 6x-2
  }
  // first derivative stencils are 2nd order: exact for quadratics, O(h^2) here
  Eigen::VectorXd g(n + 1);
  for (int i = 0; i <= n; ++i) {
    const double x = i * h;
    g(i) = x * x + x;
  }
  CHECK(boundary_first_deriv_left(g, h) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(boundary_first_deriv_right(g, h) == doctest::Approx(3.0).epsilon(1e-13));
  // second derivative stencils are exact for cubics
  CHECK(boundary_second_deriv_left(f, h) == doctest::Approx(-2.0).epsilon(1e-11));
  CHECK(boundary_second_deriv_right(f, h) == doctest::Approx(4.0).epsilon(1e-11));
}
