#include "qpgrating/experiments.hpp"

#include <algorithm>
#include <chrono>

#include "qpgrating/linalg.hpp"
#include "qpgrating/oracle_flat.hpp"

namespace qpg {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

const std::vector<double>& table1_eta(int row) {
    static const std::vector<double> r1 = {4.7, 4.2, 4.8, 3.6, 1.1, 4.4, 4.7, 3.7, 4.0, 3.9, 2.6, 3.6};
    static const std::vector<double> r2 = {4.7, 8.4, 4.8, 7.2, 1.1, 8.8, 4.7, 7.4, 4.0, 7.8, 2.6, 7.2};
    if (row == 1) return r1;
    if (row == 2) return r2;
    throw domain_error("table row must be 1 or 2");
}

MediumStack table1_stack(double k0, int row, double alpha) {
    const std::vector<double>& eta = table1_eta(row);
    const double amp = 0.2, gap = 0.6;
    MediumStack st;
    st.k0 = k0;
    st.alpha = alpha;
    st.eta.push_back(1.0);
    for (int i = 0; i < 12; ++i) {
        st.interfaces.push_back(make_sinusoid(i % 2 ? -amp : amp, gap * (5.5 - i)));
        st.eta.push_back(eta[i]);
    }
    st.H = gap * 5.5 + amp + 1.0;
    return st;
}

SolveOutcome solve_stack(const MediumStack& stack, const DiscreteBasisSpec& spec, const SolveOptions& opt) {
    const int D = spec.dimension();
    if (opt.max_dimension > 0 && D > opt.max_dimension)
        throw resource_error("system dimension " + std::to_string(D) + " exceeds the cap " +
                             std::to_string(opt.max_dimension));
    SolveOutcome out;
    auto t0 = std::chrono::steady_clock::now();
    BlockSystem sys = assemble_full(stack, spec, opt.assembly);
    out.seconds_assembly = seconds_since(t0);
    out.stats = sys.stats;
    out.D = sys.D;
    if (!opt.dump_path.empty()) dump_system(sys, opt.dump_path);

    t0 = std::chrono::steady_clock::now();
    std::vector<cplx> copy;
    if (opt.residual) copy = sys.matrix;
    const Factorization f = lu_factor(std::move(sys.matrix), sys.D);
    const std::vector<cplx> x = solve(f, sys.rhs);
    if (opt.condition) out.condition = condition_estimate(f);
    if (opt.residual) out.residual = relative_residual(copy, sys.D, x, sys.rhs);
    out.seconds_solve = seconds_since(t0);
    out.solution = DensitySolution::from_vector(stack, sys, x);
    return out;
}

ConvergenceStudy convergence_against(const MediumStack& stack, const std::vector<int>& Ns,
                                     const DensitySolution& reference, const SolveOptions& opt) {
    ConvergenceStudy study;
    const auto t0 = std::chrono::steady_clock::now();
    for (int N : Ns) {
        const SolveOutcome s = solve_stack(stack, DiscreteBasisSpec::uniform(stack.M(), N), opt);
        ConvergencePoint p;
        p.N = N;
        p.D = s.D;
        p.error = sobolev_error(s.solution, reference);
        p.energy_defect = energy_balance(rayleigh_coeffs(s.solution), stack);
        p.seconds = s.seconds_assembly + s.seconds_solve;
        p.hankel_evaluations = s.stats.hankel_evaluations;
        study.points.push_back(p);
    }
    study.seconds = seconds_since(t0);
    return study;
}

ConvergenceStudy self_convergence(const MediumStack& stack, const std::vector<int>& Ns, int extra,
                                  const SolveOptions& opt) {
    if (Ns.empty()) throw domain_error("empty N sequence");
    const auto t0 = std::chrono::steady_clock::now();
    const int Nref = *std::max_element(Ns.begin(), Ns.end()) + extra;
    const SolveOutcome ref = solve_stack(stack, DiscreteBasisSpec::uniform(stack.M(), Nref), opt);
    ConvergenceStudy study = convergence_against(stack, Ns, ref.solution, opt);
    study.reference_N = Nref;
    study.reference_energy_defect = energy_balance(rayleigh_coeffs(ref.solution), stack);
    study.seconds = seconds_since(t0);
    return study;
}

ConvergenceStudy ghost_study(int n_ghosts, const std::vector<int>& Ns, const SolveOptions& opt) {
    const MediumStack st = ghost_configuration(n_ghosts);
    const DensitySolution exact = ghost_exact_densities(st, DiscreteBasisSpec::uniform(st.M(), 512));
    return convergence_against(st, Ns, exact, opt);
}

ConvergenceStudy regularity_study(int p, const std::vector<int>& Ns, const SolveOptions& opt, double a, double b,
                                  int N_exact) {
    const MediumStack st = regularity_family(a, b, p);
    const DensitySolution exact = ghost_exact_densities(st, DiscreteBasisSpec::uniform(st.M(), N_exact));
    return convergence_against(st, Ns, exact, opt);
}

std::vector<double> window_slopes(const std::vector<double>& N, const std::vector<double>& err, int width) {
    if (N.size() != err.size() || width < 2 || static_cast<int>(N.size()) < width)
        throw domain_error("window_slopes needs matching sequences of at least `width` points");
    std::vector<double> out;
    for (std::size_t s = 0; s + width <= N.size(); ++s) {
        const std::vector<double> n(N.begin() + s, N.begin() + s + width), e(err.begin() + s, err.begin() + s + width);
        out.push_back(fit_loglog_slope(n, e, width));
    }
    return out;
}

bool decays_monotonically(const std::vector<double>& err, double factor, double floor) {
    double best = 0.0;
    for (std::size_t i = 0; i < err.size(); ++i) {
        const double e = std::max(err[i], floor);
        if (i > 0 && e > factor * best) return false;
        best = i == 0 ? e : std::min(best, e);
    }
    return true;
}

HankelCount hankel_count(const MediumStack& stack, int N, int terms_per_mode) {
    AssemblyOptions o;
    o.images.kind = ImageMethod::Kind::direct;
    o.images.direct_terms = terms_per_mode * N;
    HankelCount h;
    h.N = N;
    h.direct_terms = o.images.direct_terms;
    const auto t0 = std::chrono::steady_clock::now();
    const BlockSystem sys = assemble_full(stack, DiscreteBasisSpec::uniform(stack.M(), N), o);
    h.seconds = seconds_since(t0);
    h.samples = sys.stats.max_samples;
    h.hankel_evaluations = sys.stats.hankel_evaluations;
    return h;
}

}  // namespace qpg
