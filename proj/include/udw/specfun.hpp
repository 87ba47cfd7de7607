#pragma once

#include <complex>

namespace udw::sf {

using cplx = std::complex<double>;

// Faddeeva function w(z) = exp(-z^2) erfc(-iz)
cplx faddeeva(cplx z);

cplx erf(cplx z);
cplx erfc(cplx z);

// exp(z^2) erfc(z)
cplx erfc_scaled(cplx z);

// exp(c) * erfc_scaled(z), combining exponents so neither factor overflows alone
cplx exp_erfc_scaled(cplx c, cplx z);

double erfi(double x);

// exp(-x^2) erfi(x), finite everywhere
double gauss_damped_erfi(double x);

// exp(x^2) erfc(x) for real x
double erfcx(double x);

// 1 - sqrt(pi) x erfcx(x), evaluated without cancellation for large x
double one_minus_sqrtpi_x_erfcx(double x);

// w'(z) = -2 z w(z) + 2i/sqrt(pi)
cplx faddeeva_deriv(cplx z);

}  // namespace udw::sf
