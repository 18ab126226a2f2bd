#include "qpgrating/specfun.hpp"

#include <cmath>
#include <string>

#include <boost/math/special_functions/bessel.hpp>

namespace qpg::specfun {

namespace {

using no_promote = boost::math::policies::policy<boost::math::policies::promote_double<false>,
                                                 boost::math::policies::promote_float<false>>;

void check_order(int order) {
    if (order != 0 && order != 1) throw domain_error("specfun: order must be 0 or 1, got " + std::to_string(order));
}

}  // namespace

double bessel_j(int order, double x) {
    check_order(order);
    if (!std::isfinite(x) || x < 0.0) throw domain_error("bessel_j: argument must be finite and >= 0");
    return boost::math::cyl_bessel_j(order, x, no_promote());
}

double bessel_y(int order, double x) {
    check_order(order);
    if (!std::isfinite(x) || x <= 0.0) throw domain_error("bessel_y: argument must be finite and > 0");
    return boost::math::cyl_neumann(order, x, no_promote());
}

cplx hankel1(int order, double x) {
    check_order(order);
    if (!std::isfinite(x) || x <= 0.0) throw domain_error("hankel1: argument must be finite and > 0");
    return {boost::math::cyl_bessel_j(order, x, no_promote()), boost::math::cyl_neumann(order, x, no_promote())};
}

SpecFunResult hankel1_result(int order, double x) { return {hankel1(order, x), documented_error_bound}; }

Bessel01 bessel01(double x) {
    no_promote pol;
    return {boost::math::cyl_bessel_j(0, x, pol), boost::math::cyl_bessel_j(1, x, pol),
            boost::math::cyl_neumann(0, x, pol), boost::math::cyl_neumann(1, x, pol)};
}

double bessel_j0_fast(double x) { return boost::math::cyl_bessel_j(0, x, no_promote()); }

void hankel1_sequence(int mmax, double x, cplx* out) {
    const Bessel01 b = bessel01(x);
    out[0] = {b.j0, b.y0};
    if (mmax < 1) return;
    out[1] = {b.j1, b.y1};
    const double two_over_x = 2.0 / x;
    for (int m = 1; m < mmax; ++m) out[m + 1] = (two_over_x * m) * out[m] - out[m - 1];
}

void bessel_j_sequence(int mmax, double x, double* out) {
    if (x == 0.0) {
        out[0] = 1.0;
        for (int m = 1; m <= mmax; ++m) out[m] = 0.0;
        return;
    }
    const int n = std::max(mmax, static_cast<int>(x)) + 1;
    const int start = 2 * ((n + 16 + static_cast<int>(std::sqrt(40.0 * n))) / 2);
    const double two_over_x = 2.0 / x;
    double jp = 0.0, j = 1e-300, norm_sum = 0.0;
    for (int m = start; m >= 1; --m) {
        const double jm = m * two_over_x * j - jp;
        jp = j;
        j = jm;
        if (m - 1 <= mmax) out[m - 1] = j;
        if ((m - 1) % 2 == 0 && m - 1 > 0) norm_sum += j;
        if (std::abs(j) > 1e250) {
            jp *= 1e-250;
            j *= 1e-250;
            norm_sum *= 1e-250;
            for (int q = m - 1; q <= mmax; ++q) out[q] *= 1e-250;
        }
    }
    const double scale = 1.0 / (2.0 * norm_sum + j);
    for (int m = 0; m <= mmax; ++m) out[m] *= scale;
}

}  // namespace qpg::specfun
