#include <cmath>
#include <random>

#include "doctest.h"
#include "qpgrating/assembly.hpp"
#include "qpgrating/linalg.hpp"
#include "qpgrating/oracle_flat.hpp"
#include "qpgrating/postprocess.hpp"
#include "qpgrating/spectral_quadrature.hpp"

using namespace qpg;

namespace {

MediumStack stack_of(std::vector<ParametrizedInterface> cs, std::vector<double> eta, double k0, double alpha, double H) {
    MediumStack st;
    st.interfaces = std::move(cs);
    st.eta = std::move(eta);
    st.k0 = k0;
    st.alpha = alpha;
    st.H = H;
    return st;
}

DensitySolution solved(const MediumStack& st, int N) {
    const BlockSystem sys = assemble_full(st, DiscreteBasisSpec::uniform(st.M(), N));
    return DensitySolution::from_vector(st, sys, solve(lu_factor(sys.matrix, sys.D), sys.rhs));
}

// plain coefficients int f(s) e^{-i l_theta s} ds from equispaced samples
std::vector<cplx> pairings(const std::vector<cplx>& f, double theta, int N) {
    const int n = static_cast<int>(f.size());
    std::vector<cplx> out(2 * N + 1);
    for (int l = -N; l <= N; ++l) {
        cplx acc(0.0);
        for (int q = 0; q < n; ++q) {
            const double s = two_pi * q / n;
            acc += f[q] * std::polar(1.0, -(l + theta) * s);
        }
        out[l + N] = acc * (two_pi / n);
    }
    return out;
}

}  // namespace

TEST_CASE("nearest point and classification") {
    const auto c = make_sinusoid(0.3, 0.1);
    const Vec2 p = c.eval(1.2), n = c.normal(1.2);
    const NearestPoint np = nearest_point(c, p + 0.05 * n);
    CHECK(np.t == doctest::Approx(1.2).epsilon(1e-10));
    CHECK(np.distance == doctest::Approx(0.05).epsilon(1e-10));
    const MediumStack st = stack_of({make_flat(0.0), make_flat(-1.0)}, {1.0, 2.0, 3.0}, 1.0, 0.47, 2.0);
    CHECK(classify_point(st, {0.3, 0.5}) == 0);
    CHECK(classify_point(st, {0.3, -0.5}) == 1);
    CHECK(classify_point(st, {0.3, -1.5}) == 2);
}

TEST_CASE("zero densities") {
    const MediumStack st = flat_stack(FlatBase{});
    const DensitySolution z = DensitySolution::zeros(st, DiscreteBasisSpec::uniform(1, 4));
    const Vec2 kv = incident_wavevector(st);
    const std::vector<Vec2> pts = {{0.4, 1.0}, {2.0, -1.5}};
    const auto sc = field_eval(z, pts, false), tot = field_eval(z, pts, true);
    CHECK(std::abs(sc[0]) == 0.0);
    CHECK(std::abs(sc[1]) == 0.0);
    CHECK(std::abs(tot[0] - std::polar(1.0, dot(kv, pts[0]))) < 1e-15);
    CHECK(tot[1] == cplx(0.0));
    const RayleighExpansion re = rayleigh_coeffs(z);
    for (const auto& u : re.up) CHECK(u == cplx(0.0));
    for (const auto& u : re.down) CHECK(u == cplx(0.0));
    CHECK_THROWS_AS(field_eval(z, {{0.4, 1e-8}}), Error);
}

TEST_CASE("flat case fields and Rayleigh coefficients") {
    FlatBase fb;
    const MediumStack st = flat_stack(fb);
    const DensitySolution sol = solved(st, 8);
    const FlatAnalyticSolution fs = flat_solve(fb.k0, fb.eta1, fb.alpha, fb.b);
    const double k01 = fb.k0 * std::sin(fb.alpha);
    const Vec2 x{1.0, 2.0}, y{1.0, -2.0};
    const auto u = field_eval(sol, {x, y}, false);
    CHECK(std::abs(u[0] - fs.R * std::exp(I * (k01 * x.x + fs.beta0 * (x.y - fb.b)))) < 1e-8);
    CHECK(std::abs(u[1] - fs.T * std::exp(I * (k01 * y.x - fs.beta1 * (y.y - fb.b)))) < 1e-8);
    const RayleighExpansion re = rayleigh_coeffs(sol);
    CHECK(std::abs(re.up[re.J + fs.order] - fs.rayleigh_up(st.H)) < 1e-10);
    CHECK(std::abs(re.down[re.J + fs.order] - fs.rayleigh_down(st.H)) < 1e-10);
    CHECK(energy_balance(re, st) < 1e-10);
}

TEST_CASE("no contrast transmits everything") {
    FlatBase fb;
    fb.eta1 = 1.0;
    const MediumStack st = flat_stack(fb);
    const DensitySolution sol = solved(st, 6);
    const RayleighExpansion re = rayleigh_coeffs(sol);
    const FlatAnalyticSolution fs = flat_solve(fb.k0, 1.0, fb.alpha, fb.b);
    for (const auto& v : re.up) CHECK(std::abs(v) < 1e-12);
    for (int j = -re.J; j <= re.J; ++j)
        CHECK(std::abs(re.down[j + re.J] - (j == fs.order ? fs.rayleigh_down(st.H) : cplx(0.0))) < 1e-12);
    CHECK(energy_balance(re, st) < 1e-12);
}

TEST_CASE("field of a grating solution") {
    const MediumStack st = stack_of({make_sinusoid(0.3, 0.0)}, {1.0, 1.8}, 1.7, 0.47, 1.5);
    const DensitySolution sol = solved(st, 16);
    const auto sw = derived_shift_and_wavenumbers(st);

    SUBCASE("Helmholtz residual") {
        const double h = 1e-2;
        for (Vec2 x : {Vec2{0.7, 0.9}, Vec2{2.5, -0.8}}) {
            const int m = classify_point(st, x);
            const auto v = field_eval(sol, {x, {x.x + h, x.y}, {x.x - h, x.y}, {x.x, x.y + h}, {x.x, x.y - h}}, false);
            const cplx lap = (v[1] + v[2] + v[3] + v[4] - 4.0 * v[0]) / (h * h);
            const double k = sw.k[m];
            CHECK(std::abs(lap + k * k * v[0]) < 1e-4 * k * k * std::abs(v[0]));
        }
    }

    SUBCASE("quasi-periodicity") {
        const std::vector<Vec2> a = {{0.3, 0.8}, {1.1, -0.9}, {2.0, 0.45}};
        std::vector<Vec2> b;
        for (Vec2 p : a) b.push_back({p.x + two_pi, p.y});
        const auto ua = field_eval(sol, a, false), ub = field_eval(sol, b, false);
        const cplx ph = std::polar(1.0, two_pi * sw.theta);
        for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(ub[i] - ph * ua[i]) < 1e-8);
    }

    SUBCASE("Rayleigh coefficients match sampled fields") {
        const RayleighExpansion re = rayleigh_coeffs(sol);
        const int n = 64;
        for (bool up : {true, false}) {
            const double x2 = up ? st.H + 0.5 : -st.H - 0.5;
            std::vector<Vec2> pts;
            for (int q = 0; q < n; ++q) pts.push_back({two_pi * q / n, x2});
            const auto u = field_eval(sol, pts, false);
            std::vector<cplx> per(n);
            for (int q = 0; q < n; ++q) per[q] = u[q] * std::polar(1.0, -sw.theta * pts[q].x);
            const auto c = coeffs_1d(per, 20);
            double err = 0.0;
            for (int j = -20; j <= 20; ++j) {
                const cplx b = up ? re.beta_up[j + re.J] : re.beta_down[j + re.J];
                const cplx pred = (up ? re.up[j + re.J] : re.down[j + re.J]) * std::exp(I * b * 0.5);
                err = std::max(err, std::abs(c[j + 20] / two_pi - pred));
            }
            CHECK(err < 1e-6);
        }
    }
}

TEST_CASE("jump relations of the four operators") {
    const auto c = make_sinusoid(0.3, 0.1);
    const double k = 1.0, th = quasi_shift(1.0, 0.47);
    const int N = 8, Nd = 4;
    std::mt19937 rng(5);
    std::normal_distribution<double> nd;
    std::vector<cplx> lam(2 * N + 1, 0.0), mu(2 * N + 1, 0.0);
    for (int m = -Nd; m <= Nd; ++m) {
        const double s = std::exp(-0.5 * std::abs(m));
        lam[m + N] = s * cplx(nd(rng), nd(rng));
        mu[m + N] = s * cplx(nd(rng), nd(rng));
    }
    const SelfOperators op = self_operators(c, k, th, N);
    const QPGreensEvaluator ev(k, th);
    const int ns = 64;
    const double delta = 1e-3;

    // one-sided limits by polynomial extrapolation from distances delta, 2 delta and 3 delta
    auto traces = [&](double side) {
        std::vector<cplx> f[4];
        for (auto& v : f) v.resize(ns);
        for (int q = 0; q < ns; ++q) {
            const double s = two_pi * q / ns;
            const Vec2 z = c.eval(s), n = c.normal(s), nu = c.scaled_normal(s);
            cplx val[3][4];
            for (int r = 0; r < 3; ++r) {
                const double h = side * delta * (r + 1);
                const PotentialValues p = layer_potentials(c, ev, lam, mu, z + h * n, true);
                val[r][0] = p.sl;
                val[r][1] = p.dl;
                val[r][2] = p.grad_sl[0] * nu.x + p.grad_sl[1] * nu.y;
                val[r][3] = p.grad_dl[0] * nu.x + p.grad_dl[1] * nu.y;
            }
            for (int w = 0; w < 4; ++w) f[w][q] = 3.0 * val[0][w] - 3.0 * val[1][w] + val[2][w];
        }
        std::vector<std::vector<cplx>> out;
        for (auto& v : f) out.push_back(pairings(v, th, N));
        return out;
    };
    auto apply = [&](const std::vector<cplx>& A, const std::vector<cplx>& x, int l) {
        cplx acc(0.0);
        for (int m = -N; m <= N; ++m) acc += op(A, l, m) * x[m + N];
        return acc;
    };

    double err[4] = {0, 0, 0, 0}, scale = 0.0;
    for (double side : {1.0, -1.0}) {
        const auto t = traces(side);
        for (int l = -N; l <= N; ++l) {
            const cplx want[4] = {apply(op.V, mu, l), apply(op.K, lam, l) + side * pi * lam[l + N],
                                  apply(op.Kp, mu, l) - side * pi * mu[l + N], -apply(op.W, lam, l)};
            for (int w = 0; w < 4; ++w) {
                err[w] = std::max(err[w], std::abs(t[w][l + N] - want[w]));
                scale = std::max(scale, std::abs(want[w]));
            }
        }
    }
    MESSAGE("V " << err[0] << " K " << err[1] << " K' " << err[2] << " W " << err[3] << " scale " << scale);
    for (double e : err) CHECK(e < 1e-4);
}

TEST_CASE("energy balance on ghost stacks") {
    const MediumStack st = ghost_configuration(2);
    const DensitySolution sol = solved(st, 48);
    CHECK(energy_balance(rayleigh_coeffs(sol), st) < 1e-8);
}

TEST_CASE("Sobolev error") {
    const MediumStack st = stack_of({make_flat(0.0)}, {1.0, 2.0}, 1.3, 0.0, 2.0);
    DensitySolution a = DensitySolution::zeros(st, DiscreteBasisSpec::uniform(1, 3));
    CHECK(sobolev_error(a, a) == 0.0);
    DensitySolution b = a;
    b.lambda[0][3] = 1.0;
    CHECK(sobolev_error(a, b) == doctest::Approx(1.0).epsilon(1e-15));
    // zero padding across different mode counts and the mu weight (1 + 4)^(-1/2)
    DensitySolution c = DensitySolution::zeros(st, DiscreteBasisSpec::uniform(1, 5));
    c.mu[0][5 + 2] = 1.0;
    CHECK(sobolev_error(a, c) == doctest::Approx(std::pow(5.0, -0.25)).epsilon(1e-15));
    const MediumStack other = stack_of({make_flat(0.0), make_flat(-1.0)}, {1.0, 2.0, 3.0}, 1.3, 0.0, 2.0);
    CHECK_THROWS_AS(sobolev_error(a, DensitySolution::zeros(other, DiscreteBasisSpec::uniform(2, 3))), Error);
}
