// End-to-end acceptance run: one PASS/FAIL line per criterion; exit status 1 if any fails.
// Optional arguments select criteria by number.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "qpgrating/experiments.hpp"
#include "qpgrating/greens.hpp"
#include "qpgrating/kernels.hpp"
#include "qpgrating/oracle_flat.hpp"
#include "qpgrating/spectral_quadrature.hpp"

using namespace qpg;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;

void report(int id, const char* title, bool pass, const std::string& detail) {
    std::printf("[%s] %d %s: %s\n", pass ? "PASS" : "FAIL", id, title, detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

void progress(const std::string& s) {
    std::fprintf(stderr, "  .. %s\n", s.c_str());
    std::fflush(stderr);
}

std::string sci(double x) {
    char b[32];
    std::snprintf(b, sizeof b, "%.2e", x);
    return b;
}

std::string fix(double x, int digits = 2) {
    char b[32];
    std::snprintf(b, sizeof b, "%.*f", digits, x);
    return b;
}

std::vector<double> Ns_of(const ConvergenceStudy& s) {
    std::vector<double> v;
    for (const auto& p : s.points) v.push_back(p.N);
    return v;
}

std::vector<double> errors_of(const ConvergenceStudy& s) {
    std::vector<double> v;
    for (const auto& p : s.points) v.push_back(p.error);
    return v;
}

// shared between criteria 2, 4 and 8
std::vector<ConvergenceStudy> ghost_runs;
ConvergenceStudy table_run;
bool have_ghost = false, have_table = false;

const std::vector<int> ghost_Ns = {8, 16, 24, 32, 40, 48};
const std::vector<int> table_Ns = {8, 16, 24, 32, 40, 48, 56, 64};

void criterion1() {
    const auto t0 = Clock::now();
    double worst = 0.0;
    for (double eta : {2.0, 4.7}) {
        FlatBase fb;
        fb.eta1 = eta;
        const MediumStack st = flat_stack(fb);
        const int N = 8;
        const SolveOutcome s = solve_stack(st, DiscreteBasisSpec::uniform(1, N));
        const FlatAnalyticSolution fs = flat_solve(fb.k0, eta, fb.alpha, fb.b);
        DensitySolution exact = DensitySolution::zeros(st, DiscreteBasisSpec::uniform(1, N));
        exact.lambda[0][fs.order + N] = fs.lambda;
        exact.mu[0][fs.order + N] = fs.mu;
        worst = std::max(worst, sobolev_error(s.solution, exact));
    }
    const double t = since(t0);
    report(1, "flat interface vs closed form", worst < 1e-9 && t < 1.0,
           "N=8, eta1 in {2, 4.7}: max error " + sci(worst) + " (< 1e-9), " + fix(t, 3) + " s (< 1 s)");
}

void run_ghosts() {
    if (have_ghost) return;
    for (int g = 1; g <= 3; ++g) {
        ghost_runs.push_back(ghost_study(g, ghost_Ns));
        progress(std::to_string(g) + " ghost(s): " + fix(ghost_runs.back().seconds, 1) + " s");
    }
    have_ghost = true;
}

void criterion2() {
    const auto t0 = Clock::now();
    run_ghosts();
    const double t = since(t0);
    bool pass = t < 120.0;
    std::ostringstream d;
    for (int g = 0; g < 3; ++g) {
        const ConvergenceStudy& s = ghost_runs[g];
        const auto sl = window_slopes(Ns_of(s), errors_of(s), 3);
        const double last = s.points.back().error;
        const bool ok = sl.back() < sl.front() - 2.0 && last < 1e-7;
        pass = pass && ok;
        d << g + 1 << " ghost: slope " << fix(sl.front()) << " -> " << fix(sl.back()) << ", err(48) " << sci(last)
          << "; ";
    }
    d << fix(t, 1) << " s (< 120 s)";
    report(2, "ghost-layer super-algebraic convergence", pass, d.str());
}

void criterion3() {
    const auto t0 = Clock::now();
    bool pass = true;
    std::ostringstream d;
    const std::vector<int> doublings = {6, 12, 24, 48, 96, 192};
    for (int p : {3, 5}) {
        const ConvergenceStudy s = regularity_study(p, doublings);
        const double slope = fit_loglog_slope(Ns_of(s), errors_of(s), 6);
        const bool ok = -slope >= p - 0.5;
        pass = pass && ok;
        d << "p=" << p << " slope " << fix(slope) << " (need <= " << fix(-(p - 0.5), 1) << "); ";
        progress("p = " + std::to_string(p) + ": " + fix(s.seconds, 1) + " s");
    }
    // p = 2 is smooth: the error reaches round-off by N = 24, so the window is taken before that
    const ConvergenceStudy s2 = regularity_study(2, {4, 8, 12, 16, 20, 24});
    const auto sl = window_slopes(Ns_of(s2), errors_of(s2), 3);
    const bool ok2 = sl.back() < sl.front() - 2.0 && s2.points.back().error < 1e-7;
    pass = pass && ok2;
    const double t = since(t0);
    pass = pass && t < 300.0;
    d << "p=2 slope " << fix(sl.front()) << " -> " << fix(sl.back()) << ", err(24) " << sci(s2.points.back().error)
      << "; " << fix(t, 1) << " s (< 300 s)";
    report(3, "limited-regularity algebraic rates", pass, d.str());
}

void run_table() {
    if (have_table) return;
    table_run = self_convergence(table1_stack(2.8), table_Ns, 50);
    progress("12 layers, k0 = 2.8: " + fix(table_run.seconds, 1) + " s");
    have_table = true;
}

void criterion4() {
    const auto t0 = Clock::now();
    run_table();
    const std::vector<double> e = errors_of(table_run);
    const bool mono = decays_monotonically(e, 3.0, 1e-10);
    const double e64 = e.back();
    const double e32 = table_run.points[3].error;

    double e32_k[2];
    const double ks[2] = {14.0, 28.0};
    for (int q = 0; q < 2; ++q) {
        const ConvergenceStudy s = self_convergence(table1_stack(ks[q]), {32}, 50);
        e32_k[q] = s.points[0].error;
        progress("12 layers, k0 = " + fix(ks[q], 0) + ": " + fix(s.seconds, 1) + " s");
    }
    const double t = since(t0);
    const bool pre = e32_k[1] > e32;
    const bool pass = mono && e64 < 1e-6 && pre && t < 900.0;
    std::ostringstream d;
    d << "k0=2.8 errors";
    for (std::size_t i = 0; i < e.size(); ++i) d << " " << table_run.points[i].N << ":" << sci(e[i]);
    d << " vs N=" << table_run.reference_N << ", monotone(x3) " << (mono ? "yes" : "no") << ", err(64) " << sci(e64)
      << " (< 1e-6); err(32) k0=14 " << sci(e32_k[0]) << ", k0=28 " << sci(e32_k[1]) << " > k0=2.8 " << sci(e32)
      << " vs N=82; " << fix(t, 1) << " s (< 900 s)";
    report(4, "12-layer self-convergence", pass, d.str());
}

void criterion5() {
    const auto t0 = Clock::now();
    const auto checks = greens_cross_check(50, 2024, 2000, 80);
    double worst = 0.0;
    for (const auto& c : checks) worst = std::max(worst, c.diff);
    const double t = since(t0);
    report(5, "Green's function direct vs spectral", worst < 1e-6 && t < 10.0 && checks.size() == 50,
           std::to_string(checks.size()) + " pairs, max difference " + sci(worst) + " (< 1e-6), " + fix(t, 2) +
               " s (< 10 s)");
}

void criterion6() {
    double worst = 0.0, worst_table = 0.0;
    for (int n = 1; n <= 32; ++n)
        for (int sgn : {1, -1}) {
            const int m = sgn * n;
            // (1/2pi) int S(t) e^{-imt} dt with S even
            const double q = oracle::graded_both([&](double t) { return s_log(t) * std::cos(m * t); }, 0.0, pi) / pi;
            const double exact = 1.0 / (4.0 * pi * n);
            worst = std::max(worst, std::abs(q - exact));
            worst_table = std::max(worst_table, std::abs(log_weight(LogWeight::S, m) - exact));
        }
    report(6, "log-kernel Fourier coefficients", worst < 1e-10 && worst_table < 1e-10,
           "1 <= |n| <= 32: graded quadrature vs 1/(4 pi |n|) " + sci(worst) + ", weight table " + sci(worst_table) +
               " (< 1e-10)");
}

// plain coefficients int f(s) e^{-i l_theta s} ds from equispaced samples
std::vector<cplx> pairings(const std::vector<cplx>& f, double theta, int N) {
    const int n = static_cast<int>(f.size());
    std::vector<cplx> out(2 * N + 1);
    for (int l = -N; l <= N; ++l) {
        cplx acc(0.0);
        for (int q = 0; q < n; ++q) acc += f[q] * std::polar(1.0, -(l + theta) * two_pi * q / n);
        out[l + N] = acc * (two_pi / n);
    }
    return out;
}

void criterion7() {
    const auto c = make_sinusoid(0.3, 0.1);
    const double k = 1.0, th = quasi_shift(1.0, 0.47);
    const int N = 8, Nd = 4, ns = 64;
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
    // feature size of the sinusoid is O(1); evaluation at delta, 2 delta, 3 delta with quadratic extrapolation
    const double delta = 1e-3;
    auto traces = [&](double side) {
        std::vector<cplx> f[4];
        for (auto& v : f) v.resize(ns);
        for (int q = 0; q < ns; ++q) {
            const double s = two_pi * q / ns;
            const Vec2 z = c.eval(s), n = c.normal(s), nu = c.scaled_normal(s);
            cplx val[3][4];
            for (int r = 0; r < 3; ++r) {
                const PotentialValues p = layer_potentials(c, ev, lam, mu, z + side * delta * (r + 1) * n, true);
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
    double err[4] = {0, 0, 0, 0};
    for (double side : {1.0, -1.0}) {
        const auto t = traces(side);
        for (int l = -N; l <= N; ++l) {
            const cplx want[4] = {apply(op.V, mu, l), apply(op.K, lam, l) + side * pi * lam[l + N],
                                  apply(op.Kp, mu, l) - side * pi * mu[l + N], -apply(op.W, lam, l)};
            for (int w = 0; w < 4; ++w) err[w] = std::max(err[w], std::abs(t[w][l + N] - want[w]));
        }
    }
    const bool pass = std::all_of(err, err + 4, [](double e) { return e < 1e-4; });
    report(7, "jump relations of V, K, K', W", pass,
           "sinusoid, k=1, distance 1e-3: V " + sci(err[0]) + ", K " + sci(err[1]) + ", K' " + sci(err[2]) + ", W " +
               sci(err[3]) + " (< 1e-4)");
}

void criterion8() {
    const SolveOutcome flat = solve_stack(flat_stack(FlatBase{}), DiscreteBasisSpec::uniform(1, 48));
    const double d_flat = energy_balance(rayleigh_coeffs(flat.solution), flat.solution.stack);
    run_ghosts();
    double d_ghost = 0.0;
    for (const auto& s : ghost_runs) d_ghost = std::max(d_ghost, s.points.back().energy_defect);
    run_table();
    const double d_table = table_run.points.back().energy_defect;
    report(8, "energy balance", d_flat < 1e-8 && d_ghost < 1e-8 && d_table < 1e-5,
           "flat N=48 " + sci(d_flat) + ", ghosts N=48 " + sci(d_ghost) + " (< 1e-8); 12 layers N=64 " + sci(d_table) +
               " (< 1e-5)");
}

void criterion9() {
    const MediumStack st = ghost_configuration(1);
    const HankelCount a = hankel_count(st, 16, 4), b = hankel_count(st, 32, 4);
    const double ratio = static_cast<double>(b.hankel_evaluations) / static_cast<double>(a.hankel_evaluations);
    report(9, "Hankel-evaluation count scaling", std::abs(ratio / 8.0 - 1.0) <= 0.3,
           "direct images, N'=4N: " + std::to_string(a.hankel_evaluations) + " at N=16, " +
               std::to_string(b.hankel_evaluations) + " at N=32, ratio " + fix(ratio, 3) + " (8 +- 30%), " +
               fix(a.seconds + b.seconds, 1) + " s");
}

}  // namespace

int main(int argc, char** argv) {
    std::set<int> pick;
    for (int i = 1; i < argc; ++i) pick.insert(std::atoi(argv[i]));
    void (*run[9])() = {criterion1, criterion2, criterion3, criterion4, criterion5,
                        criterion6, criterion7, criterion8, criterion9};
    const auto t0 = Clock::now();
    for (int c = 1; c <= 9; ++c) {
        if (!pick.empty() && !pick.count(c)) continue;
        try {
            run[c - 1]();
        } catch (const std::exception& e) {
            report(c, "aborted", false, e.what());
        }
    }
    std::printf("%d failed, total %.1f s\n", failures, since(t0));
    return failures ? 1 : 0;
}
