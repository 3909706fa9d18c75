#pragma once

namespace krein::special {

// Modified Bessel functions of real positive argument.
// K0 and K1 switch between the power series (x < 2), a trapezoid rule on
// int_0^inf exp(-x cosh t) cosh(nu t) dt (2 <= x < 20) and the asymptotic
// expansion (x >= 20). Relative accuracy is about 1e-14 on all branches.
double bessel_k0(double x);
double bessel_k1(double x);
double bessel_i0(double x);
double bessel_i1(double x);

// exp(x) * K0(x), exp(x) * K1(x) without underflow for large x.
double bessel_k0_scaled(double x);
double bessel_k1_scaled(double x);

// The smooth remainder K0(x) + (ln(x/2) + gamma) I0(x) (entire in x^2).
double bessel_k0_regular(double x);

}  // namespace krein::special
