#include "qpgrating/postprocess.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss.hpp>

#include "qpgrating/spectral_quadrature.hpp"

namespace qpg {

namespace {

using GL = boost::math::quadrature::gauss<double, 16>;

cplx trig_eval(const std::vector<cplx>& c, double theta, double t) {
    const int N = (static_cast<int>(c.size()) - 1) / 2;
    const cplx step = std::polar(1.0, t);
    cplx e = std::polar(1.0, (theta - N) * t), acc(0.0);
    for (int j = -N; j <= N; ++j) {
        acc += c[j + N] * e;
        e *= step;
    }
    return acc;
}

}  // namespace

DensitySolution DensitySolution::zeros(const MediumStack& stack, const DiscreteBasisSpec& spec) {
    if (static_cast<int>(spec.N.size()) != stack.M()) throw domain_error("DensitySolution: spec size mismatch");
    DensitySolution s{stack, spec, {}, {}};
    for (int n : spec.N) {
        s.lambda.emplace_back(2 * n + 1, cplx(0.0));
        s.mu.emplace_back(2 * n + 1, cplx(0.0));
    }
    return s;
}

DensitySolution DensitySolution::from_vector(const MediumStack& stack, const BlockSystem& sys, const std::vector<cplx>& x) {
    if (static_cast<int>(x.size()) != sys.D) throw domain_error("DensitySolution: vector length mismatch");
    DensitySolution s = zeros(stack, sys.spec);
    for (int i = 0; i < stack.M(); ++i) {
        const int N = sys.spec.N[i];
        for (int m = -N; m <= N; ++m) {
            s.lambda[i][m + N] = x[sys.col_lambda(i, m)];
            s.mu[i][m + N] = x[sys.col_mu(i, m)];
        }
    }
    return s;
}

NearestPoint nearest_point(const ParametrizedInterface& c, Vec2 x) {
    const double t0 = c.param_at(x.x);
    const int n = 256;
    double best_t = t0, best = INFINITY;
    for (int q = -n / 2; q < n / 2; ++q) {
        const double t = t0 + two_pi * q / n;
        const double d = norm(c.eval(t) - x);
        if (d < best) {
            best = d;
            best_t = t;
        }
    }
    double t = best_t;
    const double h = two_pi / n;
    for (int it = 0; it < 50; ++it) {
        const Vec2 r = c.eval(t) - x, d1 = c.deriv(t), d2 = c.deriv2(t);
        const double f = dot(r, d1), fp = dot(d1, d1) + dot(r, d2);
        if (fp <= 0.0) break;
        const double tn = std::clamp(t - f / fp, best_t - h, best_t + h);
        if (std::abs(tn - t) < 1e-15) {
            t = tn;
            break;
        }
        t = tn;
    }
    const double d = norm(c.eval(t) - x);
    if (d <= best) return {t, d};
    return {best_t, best};
}

int classify_point(const MediumStack& stack, Vec2 x) {
    int m = 0;
    for (const auto& c : stack.interfaces)
        if (x.y < c.height_at(x.x)) ++m;
    // graphs are ordered downwards, so the count is the medium index unless the ordering is broken
    for (int i = 0; i < stack.M(); ++i) {
        const bool below = x.y < stack.interfaces[i].height_at(x.x);
        if (below != (i < m)) throw geometry_error("classify_point: ambiguous point (interfaces not ordered here)");
    }
    return m;
}

PotentialValues layer_potentials(const ParametrizedInterface& c, const QPGreensEvaluator& g,
                                 const std::vector<cplx>& lambda, const std::vector<cplx>& mu, Vec2 x,
                                 bool gradients) {
    const double theta = g.theta();
    const int N = static_cast<int>(std::max(lambda.size(), mu.size()) - 1) / 2;
    const NearestPoint np = nearest_point(c, x);
    const int order = gradients ? 2 : 1;
    PotentialValues out;
    auto add = [&](double t, double w) {
        const Vec2 y = c.eval(t), dz = c.deriv(t);
        const Vec2 nu{-dz.y, dz.x};
        const GreensJet G = g.eval(x, y, order);
        const cplx lm = lambda.empty() ? cplx(0.0) : trig_eval(lambda, theta, t);
        const cplx mm = mu.empty() ? cplx(0.0) : trig_eval(mu, theta, t);
        out.sl += w * G.g * mm;
        out.dl -= w * (G.gx * nu.x + G.gy * nu.y) * lm;
        if (gradients) {
            out.grad_sl[0] += w * G.gx * mm;
            out.grad_sl[1] += w * G.gy * mm;
            out.grad_dl[0] -= w * (G.gxx * nu.x + G.gxy * nu.y) * lm;
            out.grad_dl[1] -= w * (G.gxy * nu.x + G.gyy * nu.y) * lm;
        }
    };
    const double osc = N + g.k() * 1.5 + 8.0;
    if (np.distance >= 0.5) {
        const int n = next_pow2(std::max(64, static_cast<int>(std::ceil(std::max(4.0 * osc, 40.0 / np.distance)))));
        for (int q = 0; q < n; ++q) add(two_pi * q / n, two_pi / n);
        return out;
    }
    // composite Gauss-Legendre graded toward the nearest parameter
    auto panel = [&](double a, double b) {
        const int pieces = std::max(1, static_cast<int>(std::ceil((b - a) * osc / 4.0)));
        const double w = (b - a) / pieces;
        for (int p = 0; p < pieces; ++p) {
            const double lo = a + p * w, mid = lo + 0.5 * w, half = 0.5 * w;
            const auto& xs = GL::abscissa();
            const auto& ws = GL::weights();
            for (std::size_t i = 0; i < xs.size(); ++i) {
                add(mid + half * xs[i], half * ws[i]);
                if (xs[i] != 0.0) add(mid - half * xs[i], half * ws[i]);
            }
        }
    };
    const double h0 = std::max(0.25 * np.distance, 1e-9);
    for (int side : {-1, 1}) {
        double a = 0.0, b = h0;
        while (true) {
            const double bb = std::min(b, pi);
            if (side > 0) panel(np.t + a, np.t + bb);
            else panel(np.t - bb, np.t - a);
            if (bb >= pi) break;
            a = bb;
            b = 2.0 * bb;
        }
    }
    return out;
}

std::vector<cplx> field_eval(const DensitySolution& sol, const std::vector<Vec2>& points, bool total) {
    const MediumStack& st = sol.stack;
    const auto sw = derived_shift_and_wavenumbers(st);
    const int M = st.M();
    std::vector<std::unique_ptr<QPGreensEvaluator>> ev(M + 1);
    const Vec2 kv = incident_wavevector(st);
    std::vector<cplx> out;
    out.reserve(points.size());
    for (const Vec2& x : points) {
        const int m = classify_point(st, x);
        for (int i : {m - 1, m}) {
            if (i < 0 || i >= M) continue;
            if (nearest_point(st.interfaces[i], x).distance < 1e-6)
                throw singular_error("field_eval: point closer than 1e-6 to interface " + std::to_string(i + 1));
        }
        if (!ev[m]) ev[m] = std::make_unique<QPGreensEvaluator>(sw.k[m], sw.theta);
        cplx u(0.0);
        for (int i : {m - 1, m}) {
            if (i < 0 || i >= M) continue;
            const PotentialValues p = layer_potentials(st.interfaces[i], *ev[m], sol.lambda[i], sol.mu[i], x);
            u += p.sl - p.dl;
        }
        if (m == 0 && total) u += std::polar(1.0, dot(kv, x));
        out.push_back(u);
    }
    return out;
}

RayleighExpansion rayleigh_coeffs(const DensitySolution& sol, int J) {
    const MediumStack& st = sol.stack;
    const auto sw = derived_shift_and_wavenumbers(st);
    const double theta = sw.theta;
    const int M = st.M();
    RayleighExpansion re;
    re.H = st.H;
    const double kmax = std::max(sw.k.front(), sw.k.back());
    re.J = J > 0 ? J : std::max(sol.spec.N.front(), sol.spec.N.back()) + static_cast<int>(std::ceil(kmax)) + 10;
    for (double k : {sw.k.front(), sw.k.back()}) check_wood(k, theta, 1e-8, "rayleigh_coeffs");
    const double H = st.H;
    auto side = [&](bool up, std::vector<cplx>& coef, std::vector<cplx>& betas, std::vector<int>& prop) {
        const int i = up ? 0 : M - 1;
        const double k = up ? sw.k.front() : sw.k.back();
        const ParametrizedInterface& c = st.interfaces[i];
        const int N = sol.spec.N[i];
        const int L = N + re.J;
        const int n = FourierGrid::for_modes(L, 4 * static_cast<int>(std::ceil(k * 1.5 + 32.0))).n_samples;
        const auto pts = curve_points(c, n);
        std::vector<cplx> f(n), f1(n);
        for (int j = -re.J; j <= re.J; ++j) {
            const double jt = j + theta;
            const cplx b = beta_coeff(k, theta, j);
            const double s = up ? 1.0 : -1.0;
            const cplx q2 = s * b;
            for (int p = 0; p < n; ++p) {
                const CurvePoint& y = pts[p];
                // E^-(y) e^{i beta H} without the e^{-i j_theta t} carrier
                const cplx e = std::exp(I * (b * (H - s * y.z.y)) - I * jt * (y.z.x - y.t));
                f[p] = e;
                f1[p] = -I * (jt * y.nu.x + q2 * y.nu.y) * e;
            }
            // int f e^{-i j_theta t} e^{i m_theta t} dt = FFT index j - m
            const auto F = coeffs_1d(f, L), F1 = coeffs_1d(f1, L);
            cplx acc(0.0);
            for (int m = -N; m <= N; ++m) {
                const int idx = j - m;
                acc += sol.mu[i][m + N] * F[idx + L] - sol.lambda[i][m + N] * F1[idx + L];
            }
            coef.push_back(I / (4.0 * pi * b) * acc);
            betas.push_back(b);
            if (b.imag() == 0.0 && b.real() > 0.0) prop.push_back(j);
        }
    };
    side(true, re.up, re.beta_up, re.propagating_up);
    side(false, re.down, re.beta_down, re.propagating_down);
    return re;
}

double energy_balance(const RayleighExpansion& re, const MediumStack& stack) {
    const Vec2 kv = incident_wavevector(stack);
    double flux = 0.0;
    for (int j : re.propagating_up) flux += re.beta_up[j + re.J].real() * std::norm(re.up[j + re.J]);
    for (int j : re.propagating_down) flux += re.beta_down[j + re.J].real() * std::norm(re.down[j + re.J]);
    return std::abs(1.0 - flux / std::abs(kv.y));
}

double sobolev_error(const DensitySolution& a, const DensitySolution& b, double s1, double s2) {
    if (a.stack.M() != b.stack.M()) throw domain_error("sobolev_error: stack mismatch (interface count)");
    const double theta = quasi_shift(a.stack.k0, a.stack.alpha);
    if (std::abs(theta - quasi_shift(b.stack.k0, b.stack.alpha)) > 1e-14)
        throw domain_error("sobolev_error: stack mismatch (quasi-periodic shift)");
    double acc = 0.0;
    for (int i = 0; i < a.stack.M(); ++i) {
        const int Na = a.spec.N[i], Nb = b.spec.N[i], N = std::max(Na, Nb);
        for (int j = -N; j <= N; ++j) {
            const double w = 1.0 + (j + theta) * (j + theta);
            const cplx la = std::abs(j) <= Na ? a.lambda[i][j + Na] : 0.0, lb = std::abs(j) <= Nb ? b.lambda[i][j + Nb] : 0.0;
            const cplx ma = std::abs(j) <= Na ? a.mu[i][j + Na] : 0.0, mb = std::abs(j) <= Nb ? b.mu[i][j + Nb] : 0.0;
            acc += std::pow(w, s1) * std::norm(la - lb) + std::pow(w, s2) * std::norm(ma - mb);
        }
    }
    return std::sqrt(acc);
}

}  // namespace qpg
