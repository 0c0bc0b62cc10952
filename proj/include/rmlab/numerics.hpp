#pragma once

#include <functional>

namespace rmlab::num {

/// Adaptive Simpson quadrature of f over [a, b] to the given absolute
/// tolerance.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol = 1e-12);

/// Standard normal CDF.
double normal_cdf(double x);

/// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
double gamma_p(double a, double x);

/// Regularized incomplete beta I_x(a, b), a, b > 0, x in [0, 1].
double beta_inc(double a, double b, double x);

/// Inverse of beta_inc in x for fixed (a, b): smallest x with I_x(a,b) >= p.
double beta_inc_inv(double a, double b, double p);

/// Root of f on [lo, hi] (f(lo), f(hi) of opposite sign) by bisection with
/// secant acceleration, to absolute tolerance tol on x.
double find_root(const std::function<double(double)>& f, double lo, double hi,
                 double tol = 1e-12);

}  // namespace rmlab::num
