#pragma once

#include <Eigen/Dense>
#include <stdexcept>

namespace sandwich {

// First derivative of uniformly sampled values, 4th order (centered interior,
// one-sided at the two points nearest each end).
inline Eigen::VectorXd derivative_o4(const Eigen::VectorXd& f, double h) {
  const Eigen::Index n = f.size();
  if (n < 6) throw std::invalid_argument("derivative_o4: need at least 6 samples");
  Eigen::VectorXd d(n);
  const double c = 1.0 / (12.0 * h);
  d(0) = c * (-25.0 * f(0) + 48.0 * f(1) - 36.0 * f(2) + 16.0 * f(3) - 3.0 * f(4));
  d(1) = c * (-3.0 * f(0) - 10.0 * f(1) + 18.0 * f(2) - 6.0 * f(3) + f(4));
  for (Eigen::Index i = 2; i < n - 2; ++i)
    d(i) = c * (f(i - 2) - 8.0 * f(i - 1) + 8.0 * f(i + 1) - f(i + 2));
  d(n - 2) = -c * (-3.0 * f(n - 1) - 10.0 * f(n - 2) + 18.0 * f(n - 3) - 6.0 * f(n - 4) + f(n - 5));
  d(n - 1) = -c * (-25.0 * f(n - 1) + 48.0 * f(n - 2) - 36.0 * f(n - 3) + 16.0 * f(n - 4) - 3.0 * f(n - 5));
  return d;
}

// Second derivative of uniformly sampled values, 4th order.
inline Eigen::VectorXd second_derivative_o4(const Eigen::VectorXd& f, double h) {
  const Eigen::Index n = f.size();
  if (n < 7) throw std::invalid_argument("second_derivative_o4: need at least 7 samples");
  Eigen::VectorXd d(n);
  const double c = 1.0 / (h * h);
  auto edge = [&](Eigen::Index i0, int s) {
    // 6-point one-sided stencils at offset 0 and 1 from the boundary.
    const double a0[6] = {15.0 / 4.0, -77.0 / 6.0, 107.0 / 6.0, -13.0, 61.0 / 12.0, -5.0 / 6.0};
    const double a1[6] = {5.0 / 6.0, -5.0 / 4.0, -1.0 / 3.0, 7.0 / 6.0, -1.0 / 2.0, 1.0 / 12.0};
    double v0 = 0.0, v1 = 0.0;
    for (int k = 0; k < 6; ++k) {
      v0 += a0[k] * f(i0 + s * k);
      v1 += a1[k] * f(i0 + s * k);
    }
    d(i0) = c * v0;
    d(i0 + s) = c * v1;
  };
  edge(0, +1);
  edge(n - 1, -1);
  const double w = 1.0 / (12.0 * h * h);
  for (Eigen::Index i = 2; i < n - 2; ++i)
    d(i) = w * (-f(i - 2) + 16.0 * f(i - 1) - 30.0 * f(i) + 16.0 * f(i + 1) - f(i + 2));
  return d;
}

// One-sided 2nd-order boundary derivatives on a profile sampled with spacing h.
inline double boundary_first_deriv_left(const Eigen::VectorXd& f, double h) {
  return (-3.0 * f(0) + 4.0 * f(1) - f(2)) / (2.0 * h);
}
inline double boundary_first_deriv_right(const Eigen::VectorXd& f, double h) {
  const Eigen::Index n = f.size();
  return (3.0 * f(n - 1) - 4.0 * f(n - 2) + f(n - 3)) / (2.0 * h);
}
inline double boundary_second_deriv_left(const Eigen::VectorXd& f, double h) {
  return (2.0 * f(0) - 5.0 * f(1) + 4.0 * f(2) - f(3)) / (h * h);
}
inline double boundary_second_deriv_right(const Eigen::VectorXd& f, double h) {
  const Eigen::Index n = f.size();
  return (2.0 * f(n - 1) - 5.0 * f(n - 2) + 4.0 * f(n - 3) - f(n - 4)) / (h * h);
}

}  // namespace sandwich
