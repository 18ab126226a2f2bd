#include "qpgrating/kernels.hpp"

#include <algorithm>
#include <cmath>

#include "qpgrating/specfun.hpp"

namespace qpg {

namespace {

double wrap_angle(double t) {
    double r = std::remainder(t, two_pi);
    if (r <= -pi) r += two_pi;
    return r;
}

double binomial(int n, int k) {
    double c = 1.0;
    for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
    return c;
}

}  // namespace

double s_log(double t) {
    const double r = std::remainder(t, two_pi);
    if (r == 0.0) throw singular_error("s_log: t is a multiple of 2 pi");
    return -std::log(std::abs(2.0 * std::sin(0.5 * r))) / two_pi;
}

double s1_log(double t) {
    const double r = std::remainder(t, two_pi);
    if (r == 0.0) return 0.0;
    const double sn = std::sin(r);
    return s_log(r) * sn * sn;
}

double cutoff_chi(double eps, double t) {
    const double a = std::abs(wrap_angle(t));
    if (a <= 0.5 * eps) return 1.0;
    if (a >= eps) return 0.0;
    const double u = (a - 0.5 * eps) / (0.5 * eps);
    const double ea = std::exp(-1.0 / u), eb = std::exp(-1.0 / (1.0 - u));
    return eb / (ea + eb);
}

double CutoffWindow::value(double tau) const {
    if (kind == Kind::bump) return cutoff_chi(eps, tau);
    const double s = std::sin(0.5 * tau);
    const double x = s * s, y = 1.0 - x;
    const int n = 2 * order - 1;
    double acc = 0.0;
    for (int j = order; j <= n; ++j) acc += binomial(n, j) * std::pow(y, j) * std::pow(x, n - j);
    return acc;
}

double CutoffWindow::over_cos2(double tau) const {
    if (kind == Kind::bump) {
        const double v = cutoff_chi(eps, tau);
        if (v == 0.0) return 0.0;
        const double c = std::cos(0.5 * tau);
        return v / (c * c);
    }
    const double s = std::sin(0.5 * tau);
    const double x = s * s, y = 1.0 - x;
    const int n = 2 * order - 1;
    double acc = 0.0;
    for (int j = order; j <= n; ++j) acc += binomial(n, j) * std::pow(y, j - 1) * std::pow(x, n - j);
    return acc;
}

int CutoffWindow::bandwidth() const { return kind == Kind::bump ? 128 : 2 * order - 1; }

CurvePoint curve_point(const ParametrizedInterface& c, double t) {
    CurvePoint p;
    p.t = t;
    p.z = c.eval(t);
    p.dz = c.deriv(t);
    p.ddz = c.deriv2(t);
    p.nu = {-p.dz.y, p.dz.x};
    p.speed = norm(p.dz);
    return p;
}

std::vector<CurvePoint> curve_points(const ParametrizedInterface& c, int n) {
    std::vector<CurvePoint> out(n);
    for (int q = 0; q < n; ++q) out[q] = curve_point(c, two_pi * q / n);
    return out;
}

double SelfKernel::near_radius() { return std::hypot(pi, 0.5) + 0.05; }

SelfKernel::SelfKernel(const ParametrizedInterface& curve, double k, double theta, CutoffWindow window,
                       ImageMethod images, double wood_tolerance)
    : curve_(&curve), k_(k), theta_(theta), window_(window), method_(images) {
    check_wood(k, theta, wood_tolerance, "kernel split");
    if (method_.kind == ImageMethod::Kind::expansion)
        expansion_ = std::make_shared<const ImageSum>(k, theta, near_radius());
    init(wood_tolerance);
}

SelfKernel::SelfKernel(const ParametrizedInterface& curve, std::shared_ptr<const ImageSum> expansion,
                       CutoffWindow window, ImageMethod images, double wood_tolerance)
    : curve_(&curve), k_(expansion->k()), theta_(expansion->theta()), window_(window), method_(images),
      expansion_(std::move(expansion)) {
    if (expansion_->rho_max() < near_radius())
        throw domain_error("SelfKernel: shared expansion radius is smaller than the near-field radius");
    check_wood(k_, theta_, wood_tolerance, "kernel split");
    init(wood_tolerance);
}

void SelfKernel::init(double wood_tolerance) {
    if (window_.kind == CutoffWindow::Kind::trig && window_.order < 1)
        throw domain_error("SelfKernel: window order must be >= 1");
    if (window_.kind == CutoffWindow::Kind::bump && !(window_.eps > 0.0 && window_.eps <= pi))
        throw domain_error("SelfKernel: bump width must lie in (0, pi]");
    if (method_.kind == ImageMethod::Kind::direct && method_.direct_terms < 1)
        throw domain_error("SelfKernel: direct image sum needs at least one lattice term");
    QPGreensEvaluator::Options opt;
    opt.wood_tolerance = wood_tolerance;
    far_ = std::make_unique<QPGreensEvaluator>(k_, theta_, opt);
    max_speed_ = 0.0;
    for (const auto& p : curve_points(*curve_, 512)) max_speed_ = std::max(max_speed_, p.speed);
}

int SelfKernel::bandwidth() const {
    const double x = k_ * max_speed_;
    return static_cast<int>(std::ceil(x + 6.0 * std::cbrt(x))) + 10 + window_.bandwidth();
}

GreensJet SelfKernel::greens_at(Vec2 d, int& hankel) const {
    const double r = norm(d);
    GreensJet g;
    if (method_.kind == ImageMethod::Kind::direct) {
        g = free_greens(k_, d, 1);
        const GreensJet t = direct_image_sum(k_, theta_, d, method_.direct_terms, 1, true);
        hankel += 1 + 2 * (method_.direct_terms - 1);
        g.g += t.g;
        g.gx += t.gx;
        g.gy += t.gy;
        return g;
    }
    if (r > expansion_->rho_max()) return far_->spectral_jet(d, {0.0, 0.0}, 1, static_cast<int>(std::ceil(k_ + 2.0 + 37.0 / std::abs(d.y))));
    g = free_greens(k_, d, 1);
    const GreensJet t = expansion_->eval(d, 1);
    hankel += 1;
    g.g += t.g;
    g.gx += t.gx;
    g.gy += t.gy;
    return g;
}

SplitValues SelfKernel::at(double s, double t) const { return at(curve_point(*curve_, s), curve_point(*curve_, t)); }

SplitValues SelfKernel::at(const CurvePoint& ps, const CurvePoint& pt) const {
    SplitValues v;
    const double diff = ps.t - pt.t;
    const double tau = wrap_angle(diff);
    v.nn = dot(ps.nu, pt.nu);
    if (std::abs(tau) < 1e-13) {
        // analytic diagonal limits
        const double curv = dot(pt.ddz, pt.nu);
        GreensJet t0;
        if (method_.kind == ImageMethod::Kind::direct) {
            t0 = direct_image_sum(k_, theta_, {0.0, 0.0}, method_.direct_terms, 1, true);
            v.hankel += 2 * (method_.direct_terms - 1);
        } else {
            t0 = expansion_->eval({0.0, 0.0}, 1);
        }
        const double sp2 = pt.speed * pt.speed;
        v.JV = 1.0;
        v.RV = 0.25 * I - (euler_gamma + std::log(k_ * pt.speed / 2.0)) / two_pi + t0.g;
        v.JK = v.JKp = k_ * k_ * curv / 4.0;
        const cplx gt = t0.gx * pt.nu.x + t0.gy * pt.nu.y;
        v.RK = curv / (4.0 * pi * sp2) - gt;
        v.RKp = curv / (4.0 * pi * sp2) + gt;
        return v;
    }
    const double j0 = std::round((tau - diff) / two_pi);
    const Vec2 d{ps.z.x + two_pi * j0 - pt.z.x, ps.z.y - pt.z.y};
    const double r = norm(d);
    if (r < 1e-14) throw singular_error("kernel split: curve self-intersection at distinct parameters");
    const GreensJet g = greens_at(d, v.hankel);
    const cplx phase = std::polar(1.0, -theta_ * tau);
    const specfun::Bessel01 b = specfun::bessel01(k_ * r);
    const double sh = std::sin(0.5 * tau);
    const double sin2 = 4.0 * sh * sh;  // (2 sin(tau/2))^2
    const double S = -std::log(std::abs(2.0 * sh)) / two_pi;
    const double sn = std::sin(tau);
    const double S1 = S * sn * sn;
    const double chi = window_.value(tau);
    const double c2 = window_.over_cos2(tau);
    const double kj1r = k_ * b.j1 / r;

    v.JV = phase * (b.j0 * chi);
    v.RV = phase * g.g - S * v.JV;

    const cplx grad_t = g.gx * pt.nu.x + g.gy * pt.nu.y;
    const cplx grad_s = g.gx * ps.nu.x + g.gy * ps.nu.y;
    v.JK = phase * (kj1r * (dot(d, pt.nu) / sin2) * c2);
    v.RK = -phase * grad_t - S1 * v.JK;
    v.JKp = phase * (-kj1r * (dot(d, ps.nu) / sin2) * c2);
    v.RKp = phase * grad_s - S1 * v.JKp;
    return v;
}

KernelSplit split_V(std::shared_ptr<const SelfKernel> ker) {
    return {[ker](double s, double t) { return ker->at(s, t).JV; },
            [ker](double s, double t) { return ker->at(s, t).RV; }, LogWeight::S};
}

KernelSplit split_K(std::shared_ptr<const SelfKernel> ker) {
    return {[ker](double s, double t) { return ker->at(s, t).JK; },
            [ker](double s, double t) { return ker->at(s, t).RK; }, LogWeight::S1};
}

KernelSplit split_Kprime(std::shared_ptr<const SelfKernel> ker) {
    return {[ker](double s, double t) { return ker->at(s, t).JKp; },
            [ker](double s, double t) { return ker->at(s, t).RKp; }, LogWeight::S1};
}

std::function<double(double)> curl_weight(const ParametrizedInterface& c) {
    return [&c](double t) { return 1.0 / c.speed(t); };
}

std::vector<cplx> curl_apply(const ParametrizedInterface& c, const std::vector<cplx>& coeffs, double theta, int n) {
    const int N = (static_cast<int>(coeffs.size()) - 1) / 2;
    std::vector<cplx> out(n, cplx(0.0));
    for (int q = 0; q < n; ++q) {
        const double t = two_pi * q / n;
        cplx acc(0.0);
        for (int j = -N; j <= N; ++j) {
            const double jt = j + theta;
            acc += coeffs[mode_index(j, N)] * (I * jt) * std::polar(1.0, jt * t);
        }
        out[q] = acc / c.speed(t);
    }
    return out;
}

}  // namespace qpg
