#pragma once

#include <vector>

#include "qpgrating/common.hpp"

namespace qpg::specfun {

/// Value together with the documented absolute error bound of the scheme.
struct SpecFunResult {
    cplx value;
    double abs_error_bound;
};

/// Bessel function of the first kind, order 0 or 1, x >= 0.
double bessel_j(int order, double x);
/// Bessel function of the second kind, order 0 or 1, x > 0.
double bessel_y(int order, double x);
/// Hankel function of the first kind H^(1)_order(x), order 0 or 1, x > 0.
cplx hankel1(int order, double x);
SpecFunResult hankel1_result(int order, double x);

/// J0, J1, Y0, Y1 at one argument without argument checks (x > 0).
struct Bessel01 {
    double j0, j1, y0, y1;
};
Bessel01 bessel01(double x);
double bessel_j0_fast(double x);

/// H^(1)_m(x) for m = 0..mmax by upward recurrence (x > 0).
void hankel1_sequence(int mmax, double x, cplx* out);
/// J_m(x) for m = 0..mmax by normalized backward recurrence (x >= 0).
void bessel_j_sequence(int mmax, double x, double* out);

inline constexpr double documented_error_bound = 1e-13;

}  // namespace qpg::specfun
