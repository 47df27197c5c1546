#pragma once

namespace jacobi {

/// log of the Euler beta function B(a, b), a, b > 0.
double log_beta(double a, double b);

/// Regularized incomplete beta I_x(a, b), evaluated by a modified Lentz
/// continued fraction with tail switching at x = (a+1)/(a+b+2).
/// Accurate to ~1e-14 relative over a, b >= 1/2.
double reg_inc_beta(double a, double b, double x);

}  // namespace jacobi
