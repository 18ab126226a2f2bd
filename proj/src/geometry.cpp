#include "qpgrating/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qpg {

namespace {

constexpr int range_samples = 2048;

ParametrizedInterface graph(std::string label, std::string kind, std::vector<double> params,
                            std::function<double(double)> f, std::function<double(double)> fp,
                            std::function<double(double)> fpp, int smoothness) {
    CurveFunctions cf{[f](double t) { return Vec2{t, f(t)}; }, [fp](double t) { return Vec2{1.0, fp(t)}; },
                      [fpp](double t) { return Vec2{0.0, fpp(t)}; }};
    return ParametrizedInterface(std::move(label), std::move(kind), std::move(params), std::move(cf), smoothness);
}

std::string fmt(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

}  // namespace

ParametrizedInterface::ParametrizedInterface(std::string label, std::string kind, std::vector<double> params,
                                             CurveFunctions f, int smoothness_class)
    : label_(std::move(label)), kind_(std::move(kind)), params_(std::move(params)), f_(std::move(f)),
      smoothness_(smoothness_class) {
    double lo = INFINITY, hi = -INFINITY;
    for (int q = 0; q < range_samples; ++q) {
        const double y = f_.eval(two_pi * q / range_samples).y;
        lo = std::min(lo, y);
        hi = std::max(hi, y);
    }
    range_ = {lo, hi};
}

Vec2 ParametrizedInterface::scaled_normal(double t) const {
    const Vec2 d = deriv(t);
    return {-d.y, d.x};
}

Vec2 ParametrizedInterface::normal(double t) const {
    const Vec2 nu = scaled_normal(t);
    return (1.0 / norm(nu)) * nu;
}

double ParametrizedInterface::param_at(double x1) const {
    const double shift = two_pi * std::floor((x1 - eval(0.0).x) / two_pi);
    const double target = x1 - shift;
    double a = 0.0, b = two_pi, t = target - eval(0.0).x;
    t = std::clamp(t, a, b);
    for (int it = 0; it < 100; ++it) {
        const double g = eval(t).x - target;
        if (std::abs(g) < 1e-15) break;
        if (g > 0) b = t; else a = t;
        const double tn = t - g / deriv(t).x;
        t = (tn > a && tn < b) ? tn : 0.5 * (a + b);
    }
    return t + shift;
}

double ParametrizedInterface::height_at(double x1) const { return eval(param_at(x1)).y; }

ParametrizedInterface make_flat(double b) {
    return graph("flat(" + fmt(b) + ")", "flat", {b}, [b](double) { return b; }, [](double) { return 0.0; },
                 [](double) { return 0.0; }, smooth_infinity);
}

ParametrizedInterface make_sinusoid(double a, double b, int q) {
    if (!std::isfinite(a) || !std::isfinite(b)) throw geometry_error("sinusoid: parameters must be finite");
    if (q < 1) throw geometry_error("sinusoid: frequency must be a positive integer");
    const double w = q;
    return graph("sinusoid(" + fmt(a) + "," + fmt(b) + "," + std::to_string(q) + ")", "sinusoid", {a, b, w},
                 [=](double t) { return a * std::sin(w * t) + b; }, [=](double t) { return a * w * std::cos(w * t); },
                 [=](double t) { return -a * w * w * std::sin(w * t); }, smooth_infinity);
}

ParametrizedInterface make_abs_sin_p(double a, double b, int p) {
    if (!std::isfinite(a) || !std::isfinite(b)) throw geometry_error("abs_sin_p: parameters must be finite");
    if (!(p == 2 || (p >= 3 && p % 2 == 1)))
        throw geometry_error("abs_sin_p: p must be 2 or an odd integer >= 3, got " + std::to_string(p));
    if (a == 0.0) return make_flat(b);
    const double pd = p;
    auto f = [=](double t) { return a * std::pow(std::abs(std::sin(t)), pd) + b; };
    auto fp = [=](double t) {
        const double s = std::sin(t);
        return a * pd * std::pow(std::abs(s), pd - 1.0) * (s < 0 ? -1.0 : 1.0) * std::cos(t);
    };
    auto fpp = [=](double t) {
        const double s = std::abs(std::sin(t)), c = std::cos(t);
        return a * pd * ((pd - 1.0) * std::pow(s, pd - 2.0) * c * c - std::pow(s, pd));
    };
    return graph("abs_sin_p(" + fmt(a) + "," + fmt(b) + "," + std::to_string(p) + ")", "abs_sin_p",
                 {a, b, pd}, f, fp, fpp, p == 2 ? smooth_infinity : p - 2);
}

ParametrizedInterface make_builtin_interface(const BuiltinShape& s) {
    const auto& v = s.params;
    auto need = [&](std::size_t lo, std::size_t hi) {
        if (v.size() < lo || v.size() > hi)
            throw geometry_error("builtin '" + s.name + "': wrong number of parameters");
    };
    auto as_int = [](double x, const char* what) {
        if (x != std::floor(x)) throw geometry_error(std::string(what) + " must be an integer");
        return static_cast<int>(x);
    };
    if (s.name == "flat") {
        need(1, 1);
        return make_flat(v[0]);
    }
    if (s.name == "sinusoid") {
        need(2, 3);
        return make_sinusoid(v[0], v[1], v.size() == 3 ? as_int(v[2], "sinusoid frequency") : 1);
    }
    if (s.name == "abs_sin_p") {
        need(3, 3);
        return make_abs_sin_p(v[0], v[1], as_int(v[2], "abs_sin_p exponent"));
    }
    throw geometry_error("unknown builtin interface '" + s.name + "'");
}

CurveSamples sample_curve(const ParametrizedInterface& c, int n) {
    CurveSamples s;
    s.n = n;
    s.z.resize(n);
    s.dz.resize(n);
    s.ddz.resize(n);
    s.speed.resize(n);
    for (int q = 0; q < n; ++q) {
        const double t = two_pi * q / n;
        s.z[q] = c.eval(t);
        s.dz[q] = c.deriv(t);
        s.ddz[q] = c.deriv2(t);
        s.speed[q] = norm(s.dz[q]);
    }
    return s;
}

std::vector<Violation> validate_stack(const MediumStack& st) {
    std::vector<Violation> out;
    constexpr int n = 1024;
    const int M = st.M();
    if (!(st.k0 > 0.0) || !std::isfinite(st.k0)) out.push_back({"k0 > 0", -1, 0.0, "k0 = " + fmt(st.k0)});
    if (!std::isfinite(st.alpha)) out.push_back({"finite incidence angle", -1, 0.0, ""});
    if (!(st.H > 0.0)) out.push_back({"strip height H > 0", -1, 0.0, "H = " + fmt(st.H)});
    if (M < 1) out.push_back({"at least one interface", -1, 0.0, ""});
    if (static_cast<int>(st.eta.size()) != M + 1)
        out.push_back({"eta has M+1 entries", -1, 0.0, std::to_string(st.eta.size()) + " entries for M = " +
                                                            std::to_string(M)});
    for (std::size_t i = 0; i < st.eta.size(); ++i)
        if (!(st.eta[i] > 0.0) || !std::isfinite(st.eta[i]))
            out.push_back({"eta positive and finite", static_cast<int>(i), 0.0, "eta = " + fmt(st.eta[i])});
    if (!st.eta.empty() && st.eta[0] != 1.0) out.push_back({"eta_0 = 1", 0, 0.0, "eta_0 = " + fmt(st.eta[0])});

    for (int i = 0; i < M; ++i) {
        const auto& c = st.interfaces[i];
        const Vec2 z0 = c.eval(0.0), z1 = c.eval(two_pi);
        if (std::abs(z1.x - z0.x - two_pi) > 1e-12 || std::abs(z1.y - z0.y) > 1e-12)
            out.push_back({"periodicity z(t+2pi) = z(t) + (2pi,0)", i, 0.0, ""});
        bool reported_tangent = false, reported_normal = false, reported_up = false, reported_h = false;
        for (int q = 0; q < n; ++q) {
            const double t = two_pi * q / n;
            const Vec2 d = c.deriv(t);
            const double sp = norm(d);
            if (!(sp > 1e-12) && !reported_tangent) {
                out.push_back({"non-vanishing tangent", i, t, ""});
                reported_tangent = true;
                continue;
            }
            const Vec2 nu = c.normal(t);
            if ((std::abs(norm(nu) - 1.0) > 1e-12 || std::abs(dot(nu, d)) > 1e-12 * sp) && !reported_normal) {
                out.push_back({"unit normal orthogonal to tangent", i, t, ""});
                reported_normal = true;
            }
            if (!(d.x > 0.0) && !reported_up) {
                out.push_back({"graph-type curve with upward normal", i, t, ""});
                reported_up = true;
            }
            if (!(std::abs(c.eval(t).y) < st.H) && !reported_h) {
                out.push_back({"contained in |x2| < H", i, t, "x2 = " + fmt(c.eval(t).y) + ", H = " + fmt(st.H)});
                reported_h = true;
            }
        }
    }
    for (int i = 0; i + 1 < M; ++i) {
        const auto& a = st.interfaces[i];
        const auto& b = st.interfaces[i + 1];
        double amin = INFINITY, bmax = -INFINITY, ta = 0.0, tb = 0.0;
        for (int q = 0; q < n; ++q) {
            const double t = two_pi * q / n;
            const double ya = a.eval(t).y, yb = b.eval(t).y;
            if (ya < amin) amin = ya, ta = t;
            if (yb > bmax) bmax = yb, tb = t;
        }
        if (!(amin > bmax))
            out.push_back({"ordered and non-intersecting (min x2 of Gamma_i > max x2 of Gamma_{i+1})", i,
                           amin - bmax < 0 ? ta : tb,
                           "min " + fmt(amin) + " vs max " + fmt(bmax) + " of interface " + std::to_string(i + 1)});
    }
    return out;
}

double quasi_shift(double k0, double alpha) {
    const double k01 = k0 * std::sin(alpha);
    double th = k01 - std::floor(k01);
    if (th >= 1.0) th -= 1.0;
    return th;
}

ShiftAndWavenumbers derived_shift_and_wavenumbers(const MediumStack& st) {
    ShiftAndWavenumbers r;
    r.theta = quasi_shift(st.k0, st.alpha);
    r.k.reserve(st.eta.size());
    for (double e : st.eta) r.k.push_back(e * st.k0);
    return r;
}

Vec2 incident_wavevector(const MediumStack& st) { return {st.k0 * std::sin(st.alpha), -st.k0 * std::cos(st.alpha)}; }

}  // namespace qpg
