#pragma once

namespace sandwich {

// Modified Bessel function of the first kind, order 0 or 1, by power series
// (relative truncation below 1e-14). Arguments here are real and >= 0.
double bessel_I(int order, double x);

// 2*I1(z)/z, smooth through z = 0 (value 1 there). Used to evaluate the
// kernel closed forms without the removable diagonal singularity.
double bessel_i1_ratio(double z);

// Pi(s1,s2) = e^{s1+s2} (1 - s2 e^{-s1} \int_0^1 e^{-tau s2} I0(2 sqrt(tau s1 s2)) dtau),
// evaluated by adaptive composite quadrature with absolute tolerance 1e-12.
double pi_function(double s1, double s2);

}  // namespace sandwich
