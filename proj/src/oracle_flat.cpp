#include "qpgrating/oracle_flat.hpp"

#include <algorithm>
#include <cmath>

#include "qpgrating/greens.hpp"
#include "qpgrating/spectral_quadrature.hpp"

namespace qpg {

cplx FlatAnalyticSolution::rayleigh_up(double H) const { return R * std::exp(I * beta0 * (H - b)); }
cplx FlatAnalyticSolution::rayleigh_down(double H) const { return T * std::exp(I * beta1 * (b + H)); }

double FlatAnalyticSolution::energy_defect() const {
    const double k02 = k0 * std::cos(alpha);
    double flux = 0.0;
    if (beta0.imag() == 0.0) flux += beta0.real() * std::norm(R);
    if (beta1.imag() == 0.0) flux += beta1.real() * std::norm(T);
    return std::abs(1.0 - flux / std::abs(k02));
}

FlatAnalyticSolution flat_solve(double k0, double eta1, double alpha, double b, double wood_tolerance) {
    if (!(k0 > 0.0) || !(eta1 > 0.0)) throw domain_error("flat_solve: k0 and eta1 must be positive");
    FlatAnalyticSolution s;
    s.k0 = k0;
    s.eta1 = eta1;
    s.alpha = alpha;
    s.b = b;
    s.theta = quasi_shift(k0, alpha);
    const double k1 = eta1 * k0;
    check_wood(k0, s.theta, wood_tolerance, "flat_solve");
    check_wood(k1, s.theta, wood_tolerance, "flat_solve");
    s.order = static_cast<int>(std::lround(k0 * std::sin(alpha) - s.theta));
    s.beta0 = beta_coeff(k0, s.theta, s.order);
    s.beta1 = beta_coeff(k1, s.theta, s.order);
    const double k02 = -k0 * std::cos(alpha);
    const cplx gd = std::polar(1.0, k02 * b), gn = I * k02 * gd;
    // [-1, a12; a21, -1] (lambda, mu) = -(gd, gn)
    const cplx a12 = 0.5 * I * (1.0 / s.beta0 - 1.0 / s.beta1);
    const cplx a21 = 0.5 * I * (s.beta1 - s.beta0);
    const cplx det = 1.0 - a12 * a21;
    s.lambda = (gd + a12 * gn) / det;
    s.mu = (a21 * gd + gn) / det;
    s.R = I / (2.0 * s.beta0) * s.mu - 0.5 * s.lambda;
    s.T = I / (2.0 * s.beta1) * s.mu + 0.5 * s.lambda;
    return s;
}

MediumStack flat_stack(const FlatBase& base, double H) {
    MediumStack st;
    st.interfaces.push_back(make_flat(base.b));
    st.eta = {1.0, base.eta1};
    st.k0 = base.k0;
    st.alpha = base.alpha;
    st.H = H;
    return st;
}

MediumStack build_ghost_stack(const FlatBase& base, const std::vector<ParametrizedInterface>& ghosts, double H) {
    std::vector<ParametrizedInterface> all(ghosts);
    all.push_back(make_flat(base.b));
    std::stable_sort(all.begin(), all.end(), [](const ParametrizedInterface& a, const ParametrizedInterface& c) {
        return a.x2_range().max > c.x2_range().max;
    });
    MediumStack st;
    st.k0 = base.k0;
    st.alpha = base.alpha;
    st.H = H;
    st.eta.push_back(1.0);
    bool below = false;
    for (const auto& c : all) {
        if (c.kind() == "flat" && c.params().front() == base.b && !below) below = true;
        st.eta.push_back(below ? base.eta1 : 1.0);
    }
    st.interfaces = std::move(all);
    const auto v = validate_stack(st);
    if (!v.empty()) {
        std::string msg = "build_ghost_stack: invalid configuration:";
        for (const auto& x : v) msg += " [" + x.invariant + " on interface " + std::to_string(x.interface + 1) + "]";
        throw geometry_error(msg);
    }
    return st;
}

MediumStack ghost_configuration(int n_ghosts) {
    if (n_ghosts < 1 || n_ghosts > 3) throw domain_error("ghost_configuration: 1, 2 or 3 ghost layers");
    std::vector<ParametrizedInterface> g{make_sinusoid(0.3, 1.0, 6)};
    if (n_ghosts >= 2) g.push_back(make_sinusoid(0.3, -1.0, 5));
    if (n_ghosts >= 3) g.push_back(make_sinusoid(0.3, -2.0, 4));
    return build_ghost_stack(FlatBase{}, g, 3.0);
}

MediumStack regularity_family(double a, double b, int p, const FlatBase& base) {
    const ParametrizedInterface z3 = make_abs_sin_p(a, b, p);
    const auto r = z3.x2_range();
    const double H = std::max({std::abs(r.min), std::abs(r.max), std::abs(base.b)}) + 1.0;
    return build_ghost_stack(base, {z3}, H);
}

DensitySolution ghost_exact_densities(const MediumStack& stack, const DiscreteBasisSpec& spec) {
    const auto sw = derived_shift_and_wavenumbers(stack);
    const int M = stack.M();
    int phys = -1;
    for (int i = 0; i < M; ++i)
        if (stack.eta[i] != stack.eta[i + 1]) {
            if (phys >= 0) throw domain_error("ghost_exact_densities: more than one physical interface");
            phys = i;
        }
    DensitySolution out = DensitySolution::zeros(stack, spec);
    const double eta1 = phys >= 0 ? stack.eta[phys + 1] : 1.0;
    double b = 0.0;
    if (phys >= 0) {
        const auto& c = stack.interfaces[phys];
        if (c.kind() != "flat") throw domain_error("ghost_exact_densities: the physical interface must be flat");
        b = c.params().front();
    }
    if (stack.eta.front() != 1.0) throw domain_error("ghost_exact_densities: eta_0 must be 1");
    const FlatAnalyticSolution fs = flat_solve(stack.k0, eta1, stack.alpha, b);
    const double theta = sw.theta;
    const double k01 = stack.k0 * std::sin(stack.alpha), k02 = -stack.k0 * std::cos(stack.alpha);
    for (int i = 0; i < M; ++i) {
        const int N = spec.N[i];
        if (i == phys) {
            if (std::abs(fs.order) <= N) {
                out.lambda[i][fs.order + N] = fs.lambda;
                out.mu[i][fs.order + N] = fs.mu;
            }
            continue;
        }
        const bool above = phys < 0 || i < phys;
        const ParametrizedInterface& c = stack.interfaces[i];
        const int n = FourierGrid::for_modes(N, 256).n_samples;
        std::vector<cplx> fl(n), fm(n);
        for (int q = 0; q < n; ++q) {
            const CurvePoint y = curve_point(c, two_pi * q / n);
            // w = u_down - u_up in this medium, as plane waves e^{i (q1 x1 + q2 x2)}
            cplx w(0.0), gx(0.0), gy(0.0);
            auto wave = [&](cplx amp, cplx q1, cplx q2) {
                const cplx e = amp * std::exp(I * (q1 * y.z.x + q2 * y.z.y));
                w += e;
                gx += I * q1 * e;
                gy += I * q2 * e;
            };
            if (above) {
                wave(1.0, k01, k02);
                wave(-fs.R * std::exp(-I * fs.beta0 * b), k01, fs.beta0);
            } else {
                wave(fs.T * std::exp(I * fs.beta1 * b), k01, -fs.beta1);
            }
            const cplx ph = std::polar(1.0, -theta * y.t);
            fl[q] = w * ph;
            fm[q] = (gx * y.nu.x + gy * y.nu.y) * ph;
        }
        const auto L = coeffs_1d(fl, N), Mu = coeffs_1d(fm, N);
        for (int j = 0; j < 2 * N + 1; ++j) {
            out.lambda[i][j] = L[j] / two_pi;
            out.mu[i][j] = Mu[j] / two_pi;
        }
    }
    return out;
}

double fit_loglog_slope(const std::vector<double>& N, const std::vector<double>& err, int last) {
    const int n = static_cast<int>(std::min(N.size(), err.size()));
    if (last < 2 || n < last) throw domain_error("fit_loglog_slope: not enough points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = n - last; i < n; ++i) {
        if (!(err[i] > 0.0) || !(N[i] > 0.0)) throw domain_error("fit_loglog_slope: values must be positive");
        const double x = std::log(N[i]), y = std::log(err[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (last * sxy - sx * sy) / (last * sxx - sx * sx);
}

}  // namespace qpg
