#include "sandwich/special_functions.hpp"

#include <cmath>
#include <stdexcept>

#include "sandwich/quadrature.hpp"

namespace sandwich {

namespace {

double series_I0(double x) {
  const double q = 0.25 * x * x;
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 500; ++k) {
    term *= q / (static_cast<double>(k) * k);
    sum += term;
    if (term < 1e-16 * sum) break;
  }
  return sum;
}

double series_I1_ratio(double z) {
  // 2*I1(z)/z = sum_k (z^2/4)^k / (k! (k+1)!)
  const double q = 0.25 * z * z;
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 500; ++k) {
    term *= q / (static_cast<double>(k) * (k + 1));
    sum += term;
    if (term < 1e-16 * sum) break;
  }
  return sum;
}

}  // namespace

double bessel_I(int order, double x) {
  if (order != 0 && order != 1) throw std::invalid_argument("bessel_I: order must be 0 or 1");
  if (x < 0.0) throw std::invalid_argument("bessel_I: negative argument");
  if (order == 0) return series_I0(x);
  return 0.5 * x * series_I1_ratio(x);
}

double bessel_i1_ratio(double z) {
  if (z < 0.0) throw std::invalid_argument("bessel_i1_ratio: negative argument");
  return series_I1_ratio(z);
}

double pi_function(double s1, double s2) {
  if (s1 < 0.0 || s2 < 0.0) throw std::invalid_argument("pi_function: negative argument");
  if (s2 == 0.0) return std::exp(s1);
  auto integrand = [&](double tau) {
    return std::exp(-tau * s2) * series_I0(2.0 * std::sqrt(tau * s1 * s2));
  };
  const double integral = adaptive_simpson(integrand, 0.0, 1.0, 1e-12);
  return std::exp(s1 + s2) * (1.0 - s2 * std::exp(-s1) * integral);
}

}  // namespace sandwich
