#include <cmath>
#include <cstdio>
#include <fstream>

#include "doctest.h"
#include "oracles.hpp"
#include "qpgrating/assembly.hpp"

using namespace qpg;

namespace {

MediumStack two_layer(const ParametrizedInterface& c, double k0, double alpha, double eta1) {
    MediumStack st;
    st.interfaces = {c};
    st.eta = {1.0, eta1};
    st.k0 = k0;
    st.alpha = alpha;
    st.H = 3.0;
    return st;
}

MediumStack flat_pair(double gap, double eta1, double eta2) {
    MediumStack st;
    st.interfaces = {make_flat(0.0), make_flat(-gap)};
    st.eta = {1.0, eta1, eta2};
    st.k0 = 1.0;
    st.alpha = 0.47;
    st.H = gap + 2.0;
    return st;
}

double max_abs(const std::vector<cplx>& v) {
    double m = 0.0;
    for (const auto& x : v) m = std::max(m, std::abs(x));
    return m;
}

// Galerkin entries of V, K, K' and the n.n part of W on z(t) = (t, a sin t + b) by graded quadrature
// in u = s - t (log singularity at u = 0) and the trapezoid rule in t. The chord z(s) - z(t) is formed
// without cancellation; the double-layer kernels divide by its square.
struct GradedPairings {
    int N;
    std::vector<cplx> V, K, Kp, Wnn;
};

GradedPairings graded_pairings(double a, double b, double k, double theta, int N, int nt) {
    const ParametrizedInterface c = make_sinusoid(a, b);
    const QPGreensEvaluator ev(k, theta);
    const int L = 2 * N + 1;
    GradedPairings out{N, std::vector<cplx>(L * L), std::vector<cplx>(L * L), std::vector<cplx>(L * L),
                       std::vector<cplx>(L * L)};
    const oracle::Rule rule = oracle::graded_rule_at(-pi, 0.0, pi, 16);  // innermost node ~1e-11
    std::vector<cplx> acc[4];
    for (auto& a : acc) a.assign(L, cplx(0.0));
    for (int q = 0; q < nt; ++q) {
        const double t = two_pi * q / nt;
        const Vec2 nut = c.scaled_normal(t);
        for (auto& a : acc) std::fill(a.begin(), a.end(), cplx(0.0));
        // inner integrals over u for each test mode l; the trial mode enters as e^{i m_theta t}
        for (std::size_t r = 0; r < rule.x.size(); ++r) {
            const double s = t + rule.x[r];
            const double u = rule.x[r];
            const GreensJet g = ev.eval({u, 2.0 * a * std::cos(t + 0.5 * u) * std::sin(0.5 * u)}, {0.0, 0.0}, 1);
            const Vec2 nus = c.scaled_normal(s);
            const cplx f[4] = {g.g, -(g.gx * nut.x + g.gy * nut.y), g.gx * nus.x + g.gy * nus.y,
                               -k * k * dot(nus, nut) * g.g};
            for (int l = -N; l <= N; ++l) {
                const cplx ph = rule.w[r] * std::polar(1.0, -(l + theta) * s);
                for (int w = 0; w < 4; ++w) acc[w][l + N] += f[w] * ph;
            }
        }
        std::vector<cplx>* dst[4] = {&out.V, &out.K, &out.Kp, &out.Wnn};
        for (int m = -N; m <= N; ++m) {
            const cplx em = std::polar(two_pi / nt, (m + theta) * t);
            for (int l = -N; l <= N; ++l)
                for (int w = 0; w < 4; ++w) (*dst[w])[(l + N) * L + (m + N)] += acc[w][l + N] * em;
        }
    }
    return out;
}

}  // namespace

TEST_CASE("dimension") {
    CHECK(DiscreteBasisSpec::uniform(12, 32).dimension() == 1560);
    CHECK(DiscreteBasisSpec{{1, 2, 3}}.dimension() == 2 * (3 + 5 + 7));
}

TEST_CASE("flat self operators are diagonal with the spectral symbols") {
    const double th = quasi_shift(1.0, 0.47);
    const auto c = make_flat(0.4);
    const int N = 6;
    for (double k : {1.0, 2.3}) {
        const SelfOperators op = self_operators(c, k, th, N);
        double off = 0.0, dv = 0.0, dw = 0.0;
        for (int l = -N; l <= N; ++l)
            for (int m = -N; m <= N; ++m) {
                if (l != m) {
                    off = std::max({off, std::abs(op(op.V, l, m)), std::abs(op(op.W, l, m))});
                    continue;
                }
                const cplx b = beta_coeff(k, th, l);
                dv = std::max(dv, std::abs(op(op.V, l, l) - two_pi * I / (2.0 * b)));
                dw = std::max(dw, std::abs(op(op.W, l, l) + two_pi * I * b / 2.0));
            }
        CHECK(off < 1e-11);
        CHECK(dv < 1e-11);
        CHECK(dw < 1e-10);
        CHECK(max_abs(op.K) < 1e-11);
        CHECK(max_abs(op.Kp) < 1e-11);
    }
}

TEST_CASE("self block of a ghost interface vanishes") {
    const MediumStack st = two_layer(make_sinusoid(0.3, 0.0), 1.0, 0.47, 1.0);
    const SelfOperators a = assemble_self_block(st, 0, DiscreteBasisSpec::uniform(1, 5));
    CHECK(max_abs(a.V) == 0.0);
    CHECK(max_abs(a.W) == 0.0);
}

TEST_CASE("flat self block is the symbol difference") {
    const MediumStack st = two_layer(make_flat(0.0), 1.0, 0.47, 2.0);
    const int N = 5;
    const auto sw = derived_shift_and_wavenumbers(st);
    const SelfOperators a = assemble_self_block(st, 0, DiscreteBasisSpec::uniform(1, N));
    double err = 0.0;
    for (int j = -N; j <= N; ++j) {
        const cplx want = two_pi * (I / (2.0 * beta_coeff(sw.k[0], sw.theta, j)) -
                                    I / (2.0 * beta_coeff(sw.k[1], sw.theta, j)));
        err = std::max(err, std::abs(a(a.V, j, j) - want));
    }
    CHECK(err < 1e-11);
}

TEST_CASE("sinusoid self operators match graded-mesh Galerkin quadrature") {
    const auto c = make_sinusoid(0.3, 0.1);
    const double k = 1.0, th = quasi_shift(1.0, 0.47);
    const int N = 8;
    const SelfOperators op = self_operators(c, k, th, N);
    const GradedPairings ref = graded_pairings(0.3, 0.1, k, th, N, 48);
    double ev = 0, ek = 0, ekp = 0, ew = 0;
    for (int l = -N; l <= N; ++l)
        for (int m = -N; m <= N; ++m) {
            const std::size_t i = (l + N) * (2 * N + 1) + (m + N);
            ev = std::max(ev, std::abs(op.V[i] - ref.V[i]));
            ek = std::max(ek, std::abs(op.K[i] - ref.K[i]));
            ekp = std::max(ekp, std::abs(op.Kp[i] - ref.Kp[i]));
            const cplx w = (l + th) * (m + th) * ref.V[i] + ref.Wnn[i];
            ew = std::max(ew, std::abs(op.W[i] - w) / (1.0 + std::abs(w)));
        }
    MESSAGE("V " << ev << " K " << ek << " K' " << ekp << " W " << ew);
    CHECK(ev < 1e-7);
    CHECK(ek < 1e-7);
    CHECK(ekp < 1e-7);
    CHECK(ew < 1e-7);
}

TEST_CASE("kernel-level and matrix-level differences agree") {
    const MediumStack st = two_layer(make_sinusoid(0.25, 0.0, 2), 1.3, 0.3, 3.1);
    const auto spec = DiscreteBasisSpec::uniform(1, 10);
    AssemblyOptions a, b;
    b.kernel_level_difference = false;
    const SelfOperators x = assemble_self_block(st, 0, spec, a), y = assemble_self_block(st, 0, spec, b);
    double e = 0.0;
    for (std::size_t i = 0; i < x.V.size(); ++i)
        e = std::max({e, std::abs(x.V[i] - y.V[i]), std::abs(x.K[i] - y.K[i]), std::abs(x.Kp[i] - y.Kp[i]),
                      std::abs(x.W[i] - y.W[i]) / (1.0 + std::abs(x.W[i]))});
    CHECK(e < 1e-10);
}

TEST_CASE("flat cross blocks") {
    const double gap = 2.0;
    const MediumStack st = flat_pair(gap, 2.0, 3.0);
    const int N = 6;
    const auto spec = DiscreteBasisSpec::uniform(2, N);
    const auto sw = derived_shift_and_wavenumbers(st);
    const double k = sw.k[1];
    for (auto [i, j] : {std::pair{0, 1}, std::pair{1, 0}}) {
        const CrossBlock B = assemble_cross_block(st, i, j, spec);
        double err = 0.0, off = 0.0;
        for (int l = -N; l <= N; ++l)
            for (int m = -N; m <= N; ++m) {
                const cplx v = B.SL_D[(l + N) * (2 * N + 1) + (m + N)];
                if (l != m) {
                    off = std::max(off, std::abs(v));
                    continue;
                }
                const cplx b = beta_coeff(k, sw.theta, l);
                err = std::max(err, std::abs(v - two_pi * I / (2.0 * b) * std::exp(I * b * gap)));
            }
        CHECK(err < 1e-12);
        CHECK(off < 1e-12);
        // evanescent decay across modes
        const double e3 = std::abs(B.SL_D[(N + 3) * (2 * N + 1) + (N + 3)]);
        const double e6 = std::abs(B.SL_D[(2 * N) * (2 * N + 1) + 2 * N]);
        CHECK(e6 < e3 * std::exp(-2.5 * gap));
    }
}

TEST_CASE("separable and pointwise cross blocks agree") {
    MediumStack st;
    st.interfaces = {make_sinusoid(0.2, 0.0), make_sinusoid(0.15, -0.9, 2)};
    st.eta = {1.0, 2.0, 1.5};
    st.k0 = 1.0;
    st.alpha = 0.47;
    st.H = 2.0;
    const auto spec = DiscreteBasisSpec{{7, 5}};
    AssemblyOptions pw;
    pw.pointwise_cross = true;
    for (auto [i, j] : {std::pair{0, 1}, std::pair{1, 0}}) {
        const CrossBlock a = assemble_cross_block(st, i, j, spec), b = assemble_cross_block(st, i, j, spec, pw);
        REQUIRE(a.SL_D.size() == b.SL_D.size());
        double e = 0.0;
        for (std::size_t q = 0; q < a.SL_D.size(); ++q)
            e = std::max({e, std::abs(a.SL_D[q] - b.SL_D[q]), std::abs(a.DL_D[q] - b.DL_D[q]),
                          std::abs(a.SL_N[q] - b.SL_N[q]), std::abs(a.DL_N[q] - b.DL_N[q])});
        MESSAGE("cross " << i << j << " " << e);
        CHECK(e < 1e-9);
    }
}

TEST_CASE("non-adjacent cross block is zero") {
    MediumStack st;
    st.interfaces = {make_flat(0.0), make_flat(-0.5), make_flat(-1.0)};
    st.eta = {1.0, 2.0, 3.0, 1.5};
    st.k0 = 1.0;
    st.alpha = 0.47;
    st.H = 2.0;
    const CrossBlock B = assemble_cross_block(st, 0, 2, DiscreteBasisSpec::uniform(3, 4));
    CHECK(max_abs(B.SL_D) == 0.0);
    CHECK(max_abs(B.DL_N) == 0.0);
}

TEST_CASE("incident right-hand side") {
    const MediumStack st = two_layer(make_flat(0.0), 1.0, 0.0, 2.0);
    const auto spec = DiscreteBasisSpec::uniform(1, 4);
    // k0 = 1 at normal incidence is a Wood frequency, so only the row layout comes from another system
    const BlockSystem sys = assemble_full(two_layer(make_flat(0.0), 1.2, 0.1, 2.0), spec);
    const auto rhs = incident_rhs(st, spec);
    REQUIRE(rhs.size() == 18u);
    for (int l = -4; l <= 4; ++l) {
        const cplx d = rhs[sys.row(0, BlockSystem::Row::dirichlet, l)];
        const cplx n = rhs[sys.row(0, BlockSystem::Row::neumann, l)];
        if (l == 0) {
            CHECK(std::abs(d + two_pi) < 1e-12);
            CHECK(std::abs(n - two_pi * I) < 1e-12);
        } else {
            CHECK(std::abs(d) < 1e-12);
            CHECK(std::abs(n) < 1e-12);
        }
    }
    MediumStack st3;
    st3.interfaces = {make_sinusoid(0.2, 0.0), make_flat(-1.0)};
    st3.eta = {1.0, 2.0, 3.0};
    st3.k0 = 1.0;
    st3.alpha = 0.47;
    st3.H = 2.0;
    const auto spec3 = DiscreteBasisSpec::uniform(2, 4);
    const auto r3 = incident_rhs(st3, spec3);
    for (std::size_t q = 18; q < r3.size(); ++q) CHECK(r3[q] == cplx(0.0));
}

TEST_CASE("full system structure") {
    const MediumStack st = flat_pair(1.0, 2.0, 3.0);
    const auto spec = DiscreteBasisSpec::uniform(2, 3);
    const BlockSystem sys = assemble_full(st, spec);
    CHECK(sys.D == 28);
    // flat stacks decouple by mode: entry (r, c) vanishes unless the modes agree
    double off = 0.0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int l = -3; l <= 3; ++l)
                for (int m = -3; m <= 3; ++m) {
                    if (l == m) continue;
                    for (auto r : {BlockSystem::Row::dirichlet, BlockSystem::Row::neumann})
                        off = std::max({off, std::abs(sys.at(sys.row(i, r, l), sys.col_lambda(j, m))),
                                        std::abs(sys.at(sys.row(i, r, l), sys.col_mu(j, m)))});
                }
    CHECK(off < 1e-11);

    MediumStack s3;
    s3.interfaces = {make_sinusoid(0.1, 0.0), make_sinusoid(0.1, -0.6), make_sinusoid(0.1, -1.2)};
    s3.eta = {1.0, 2.0, 1.5, 2.5};
    s3.k0 = 1.0;
    s3.alpha = 0.47;
    s3.H = 2.0;
    const BlockSystem b3 = assemble_full(s3, DiscreteBasisSpec::uniform(3, 3));
    double far = 0.0, near = 0.0;
    for (int r = 0; r < 14; ++r)
        for (int c = 28; c < 42; ++c) far = std::max({far, std::abs(b3.at(r, c)), std::abs(b3.at(c, r))});
    for (int r = 0; r < 14; ++r)
        for (int c = 14; c < 28; ++c) near = std::max(near, std::abs(b3.at(r, c)));
    CHECK(far == 0.0);
    CHECK(near > 1e-3);
}

TEST_CASE("matrix dump layout") {
    const MediumStack st = two_layer(make_flat(0.0), 1.0, 0.2, 2.0);
    const BlockSystem sys = assemble_full(st, DiscreteBasisSpec::uniform(1, 2));
    const std::string path = "test_assembly_dump.bin";
    dump_system(sys, path);
    std::ifstream f(path, std::ios::binary);
    char magic[4];
    std::uint32_t ver = 0;
    std::uint64_t rows = 0, cols = 0;
    f.read(magic, 4);
    f.read(reinterpret_cast<char*>(&ver), sizeof ver);
    f.read(reinterpret_cast<char*>(&rows), sizeof rows);
    f.read(reinterpret_cast<char*>(&cols), sizeof cols);
    CHECK(std::string(magic, 4) == "QPGM");
    CHECK(ver == 1u);
    CHECK(rows == 10u);
    CHECK(cols == 10u);
    std::vector<cplx> m(100), r(10);
    f.read(reinterpret_cast<char*>(m.data()), 100 * sizeof(cplx));
    f.read(reinterpret_cast<char*>(r.data()), 10 * sizeof(cplx));
    CHECK(f.good());
    CHECK(m == sys.matrix);
    CHECK(r == sys.rhs);
    f.close();
    std::remove(path.c_str());
}

TEST_CASE("threaded assembly is identical") {
    MediumStack st;
    st.interfaces = {make_sinusoid(0.2, 0.0), make_sinusoid(0.1, -0.7, 2), make_flat(-1.3)};
    st.eta = {1.0, 2.0, 1.5, 2.5};
    st.k0 = 1.0;
    st.alpha = 0.47;
    st.H = 2.0;
    const auto spec = DiscreteBasisSpec::uniform(3, 6);
    AssemblyOptions o2;
    o2.threads = 3;
    const BlockSystem a = assemble_full(st, spec), b = assemble_full(st, spec, o2);
    CHECK(a.matrix == b.matrix);
    CHECK(a.stats.hankel_evaluations == b.stats.hankel_evaluations);
}
