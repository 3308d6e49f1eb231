#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace sandwich {

// Composite trapezoid over uniformly sampled values with spacing h.
inline double trapezoid(const Eigen::VectorXd& v, double h) {
  const Eigen::Index n = v.size();
  if (n < 2) return 0.0;
  return h * (v.sum() - 0.5 * (v(0) + v(n - 1)));
}

inline double trapezoid(const std::vector<double>& v, double h) {
  return trapezoid(Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())), h);
}

// Running integral sampled at the same points as v; out(0) = 0.
inline std::vector<double> cumulative_trapezoid(const std::vector<double>& v, double h) {
  std::vector<double> out(v.size(), 0.0);
  for (size_t k = 1; k < v.size(); ++k)
    out[k] = out[k - 1] + 0.5 * h * (v[k - 1] + v[k]);
  return out;
}

// Composite Simpson over uniformly sampled values; an odd interval count is
// handled with a 3/8 rule on the final three intervals.
inline double simpson(const Eigen::VectorXd& v, double h) {
  const Eigen::Index n = v.size() - 1;  // interval count
  if (n <= 0) return 0.0;
  if (n == 1) return 0.5 * h * (v(0) + v(1));
  if (n == 2) return h / 3.0 * (v(0) + 4.0 * v(1) + v(2));
  Eigen::Index n_simp = (n % 2 == 0) ? n : n - 3;
  double acc = 0.0;
  if (n_simp >= 2) {
    acc += v(0) + v(n_simp);
    for (Eigen::Index i = 1; i < n_simp; i += 2) acc += 4.0 * v(i);
    for (Eigen::Index i = 2; i < n_simp; i += 2) acc += 2.0 * v(i);
    acc *= h / 3.0;
  }
  if (n_simp != n)
    acc += 3.0 * h / 8.0 * (v(n - 3) + 3.0 * v(n - 2) + 3.0 * v(n - 1) + v(n));
  return acc;
}

// Adaptive Simpson with absolute tolerance.
namespace detail {
inline double adaptive_simpson_rec(const std::function<double(double)>& f, double a, double b,
                                   double fa, double fm, double fb, double whole, double tol,
                                   int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}
}  // namespace detail

inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double abs_tol, int max_depth = 40) {
  if (!(b > a)) return 0.0;
  const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, abs_tol, max_depth);
}

}  // namespace sandwich
