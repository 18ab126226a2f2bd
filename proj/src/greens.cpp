#include "qpgrating/greens.hpp"

#include <cmath>
#include <memory>
#include <random>
#include <sstream>

#include "qpgrating/specfun.hpp"

namespace qpg {

cplx beta_coeff(double k, double theta, int j) {
    const double jt = j + theta;
    const double d = k * k - jt * jt;
    return d >= 0.0 ? cplx(std::sqrt(d), 0.0) : cplx(0.0, std::sqrt(-d));
}

WoodInfo wood_nearest(double k, double theta) {
    const int jmax = static_cast<int>(std::ceil(k)) + 2;
    WoodInfo best{INFINITY, 0};
    for (int j = -jmax; j <= jmax; ++j) {
        const double d = std::abs(std::abs(j + theta) - k);
        if (d < best.distance) best = {d, j};
    }
    return best;
}

double wood_distance(double k, double theta) { return wood_nearest(k, theta).distance; }

void check_wood(double k, double theta, double tol, const std::string& who) {
    const WoodInfo w = wood_nearest(k, theta);
    if (w.distance <= tol) {
        std::ostringstream os;
        os << who << ": wavenumber k = " << k << " is a Rayleigh-Wood frequency for theta = " << theta
           << " (order j = " << w.j << ", ||j+theta| - k| = " << w.distance << ")";
        throw wood_error(os.str());
    }
}

double lattice_window(double u) {
    u = std::abs(u);
    if (u <= 0.5) return 1.0;
    if (u >= 1.0) return 0.0;
    const double s = 2.0 * (u - 0.5);
    const double a = std::exp(-1.0 / s), b = std::exp(-1.0 / (1.0 - s));
    return b / (a + b);
}

namespace {

cplx unit_phase(double turns) {
    const double f = turns - std::floor(turns);
    return std::polar(1.0, two_pi * f);
}

}  // namespace

GreensJet free_greens(double k, Vec2 d, int order) {
    const double r = norm(d);
    const double kr = k * r;
    GreensJet out;
    if (order == 0) {
        out.g = 0.25 * I * specfun::hankel1(0, kr);
        return out;
    }
    const specfun::Bessel01 b = specfun::bessel01(kr);
    const cplx h0(b.j0, b.y0), h1(b.j1, b.y1);
    out.g = 0.25 * I * h0;
    const double ux = d.x / r, uy = d.y / r;
    const cplx gr = -0.25 * I * k * h1;
    out.gx = gr * ux;
    out.gy = gr * uy;
    if (order >= 2) {
        const cplx a = -k * k * h0, c = k * h1 / r;
        out.gxx = 0.25 * I * (a * ux * ux + c * (2.0 * ux * ux - 1.0));
        out.gyy = 0.25 * I * (a * uy * uy + c * (2.0 * uy * uy - 1.0));
        out.gxy = 0.25 * I * (a * ux * uy + c * (2.0 * ux * uy));
    }
    return out;
}

namespace {

double wood_checked(double k, double theta, double tol) {
    check_wood(k, theta, tol, "QPGreensEvaluator");
    return k;
}

}  // namespace

int ImageSum::default_lattice_terms(double wood) {
    const double n = 250.0 / std::max(wood, 1e-12);
    return static_cast<int>(std::clamp(n, 2000.0, 1.0e6));
}

ImageSum::ImageSum(double k, double theta, double rho_max, int lattice_terms)
    : k_(k), theta_(theta), rho_max_(rho_max) {
    if (!(k > 0.0)) throw domain_error("ImageSum: k must be positive");
    if (!(rho_max > 0.0) || rho_max > 0.8 * two_pi)
        throw domain_error("ImageSum: expansion radius outside the convergence disc of the lattice");
    M_ = terms_for(rho_max);
    n_lattice_ = lattice_terms > 0 ? lattice_terms : default_lattice_terms(wood_distance(k, theta));
    sigma_.assign(2 * M_ + 1, cplx(0.0));
    std::vector<cplx> h(M_ + 1);
    for (int n = 1; n <= n_lattice_; ++n) {
        const double w = lattice_window(static_cast<double>(n) / n_lattice_);
        if (w == 0.0) continue;
        specfun::hankel1_sequence(M_, two_pi * k * n, h.data());
        ++hankel_evals_;
        const cplx e = unit_phase(-n * theta), ec = std::conj(e);
        for (int m = 0; m <= M_; ++m) {
            const double sg = (m % 2 == 0) ? 1.0 : -1.0;
            const cplx wh = w * h[m];
            sigma_[M_ + m] += wh * (sg * e + ec);
            if (m > 0) sigma_[M_ - m] += wh * (e + sg * ec);
        }
    }
}

int ImageSum::terms_for(double rho) const {
    const double x = k_ * rho;
    double m = x + 12.0 * std::cbrt(x) + 16.0;
    if (m > 0.9 * two_pi * k_) m += 36.0 / std::log(two_pi / std::max(rho, 1e-3));
    return static_cast<int>(std::ceil(m));
}

GreensJet ImageSum::eval(Vec2 d, int order) const {
    const double rho = norm(d);
    if (rho > rho_max_ * (1.0 + 1e-12)) throw domain_error("ImageSum: point outside the expansion disc");
    const int m = std::min(M_, terms_for(rho));
    const int ext = order + 1;
    thread_local std::vector<double> jv;
    thread_local std::vector<cplx> pv;
    jv.resize(m + ext + 1);
    pv.resize(2 * (m + ext) + 1);
    specfun::bessel_j_sequence(m + ext, k_ * rho, jv.data());
    const cplx eiphi = rho > 0.0 ? cplx(d.x / rho, d.y / rho) : cplx(1.0, 0.0);
    cplx* P = pv.data() + (m + ext);
    cplx ph(1.0, 0.0);
    P[0] = jv[0];
    for (int j = 1; j <= m + ext; ++j) {
        ph *= eiphi;
        P[j] = jv[j] * ph;
        P[-j] = ((j % 2 == 0) ? 1.0 : -1.0) * jv[j] * std::conj(ph);
    }
    const cplx* sg = sigma_.data() + M_;
    cplx t(0.0), dp(0.0), dm(0.0), dpp(0.0), dmm(0.0);
    for (int j = -m; j <= m; ++j) {
        const cplx s = sg[j];
        t += s * P[j];
        if (order >= 1) {
            dp += s * P[j + 1];
            dm += s * P[j - 1];
        }
        if (order >= 2) {
            dpp += s * P[j + 2];
            dmm += s * P[j - 2];
        }
    }
    GreensJet out;
    out.g = 0.25 * I * t;
    if (order >= 1) {
        const cplx Dp = -0.25 * I * k_ * dp, Dm = 0.25 * I * k_ * dm;
        out.gx = 0.5 * (Dp + Dm);
        out.gy = (Dp - Dm) / (2.0 * I);
        if (order >= 2) {
            const cplx Dpp = 0.25 * I * k_ * k_ * dpp, Dmm = 0.25 * I * k_ * k_ * dmm;
            const cplx lap = -k_ * k_ * out.g;
            out.gxx = 0.25 * (Dpp + Dmm + 2.0 * lap);
            out.gyy = -0.25 * (Dpp + Dmm - 2.0 * lap);
            out.gxy = (Dpp - Dmm) / (4.0 * I);
        }
    }
    return out;
}

GreensJet direct_image_sum(double k, double theta, Vec2 d, int n_prime, int order, bool windowed) {
    GreensJet acc;
    for (int n = -n_prime; n <= n_prime; ++n) {
        if (n == 0) continue;
        const double w = windowed ? lattice_window(static_cast<double>(n) / n_prime) : 1.0;
        if (w == 0.0) continue;
        const cplx c = w * unit_phase(-n * theta);
        const GreensJet g = free_greens(k, {d.x + two_pi * n, d.y}, order);
        acc.g += c * g.g;
        acc.gx += c * g.gx;
        acc.gy += c * g.gy;
        acc.gxx += c * g.gxx;
        acc.gxy += c * g.gxy;
        acc.gyy += c * g.gyy;
    }
    return acc;
}

QPGreensEvaluator::QPGreensEvaluator(double k, double theta, Options opt)
    : k_(k), theta_(theta), opt_(opt),
      images_(wood_checked(k, theta, opt.wood_tolerance), theta, std::hypot(pi, opt.dispatch_height) + 0.05) {
    if (opt_.lattice_truncation < 0 || opt_.spectral_truncation < 1)
        throw domain_error("QPGreensEvaluator: truncation parameters must be >= 1");
}

namespace {

void check_not_singular(Vec2 d) {
    const double n0 = std::round(-d.x / two_pi);
    if (std::hypot(d.x + two_pi * n0, d.y) < 1e-12)
        throw singular_error("Green's function evaluated at a lattice-singular point");
}

}  // namespace

cplx QPGreensEvaluator::direct(Vec2 x, Vec2 y) const {
    const Vec2 d = x - y;
    check_not_singular(d);
    const int Np = opt_.lattice_truncation;
    cplx acc(0.0);
    for (int n = -Np; n <= Np; ++n) {
        const double w = (opt_.windowed && Np > 0) ? lattice_window(static_cast<double>(n) / Np) : 1.0;
        if (w == 0.0) continue;
        const double r = std::hypot(d.x + two_pi * n, d.y);
        acc += w * unit_phase(-n * theta_) * (0.25 * I * specfun::hankel1(0, k_ * r));
    }
    return acc;
}

std::array<cplx, 2> QPGreensEvaluator::direct_grad_y(Vec2 x, Vec2 y) const {
    const Vec2 d = x - y;
    check_not_singular(d);
    const int Np = opt_.lattice_truncation;
    cplx gx(0.0), gy(0.0);
    for (int n = -Np; n <= Np; ++n) {
        const double w = (opt_.windowed && Np > 0) ? lattice_window(static_cast<double>(n) / Np) : 1.0;
        if (w == 0.0) continue;
        const Vec2 dn{d.x + two_pi * n, d.y};
        const double r = norm(dn);
        const cplx c = w * unit_phase(-n * theta_) * (0.25 * I * k_ * specfun::hankel1(1, k_ * r) / r);
        gx += c * dn.x;
        gy += c * dn.y;
    }
    return {gx, gy};
}

GreensJet QPGreensEvaluator::spectral_jet(Vec2 x, Vec2 y, int order, int Jover) const {
    const double d1 = x.x - y.x, d2 = x.y - y.y;
    if (std::abs(d2) < 1e-3) throw domain_error("greens_spectral: |x2 - y2| < 1e-3, use the direct representation");
    const double sgn = d2 > 0 ? 1.0 : -1.0, h = std::abs(d2);
    const int J = Jover > 0 ? Jover : opt_.spectral_truncation;
    GreensJet out;
    const cplx base = std::polar(1.0, theta_ * d1);
    const cplx step = std::polar(1.0, d1);
    cplx ep = base, em = base / step;
    auto add = [&](int j, cplx e1) {
        const double jt = j + theta_;
        const cplx b = beta_coeff(k_, theta_, j);
        const cplx e2 = b.imag() > 0.0 && b.real() == 0.0 ? cplx(std::exp(-b.imag() * h)) : std::exp(I * b * h);
        const cplx term = I / (4.0 * pi * b) * e1 * e2;
        out.g += term;
        if (order >= 1) {
            const cplx q1 = I * jt, q2 = I * b * sgn;
            out.gx += q1 * term;
            out.gy += q2 * term;
            if (order >= 2) {
                out.gxx += q1 * q1 * term;
                out.gxy += q1 * q2 * term;
                out.gyy += q2 * q2 * term;
            }
        }
    };
    for (int j = 0; j <= J; ++j) {
        add(j, ep);
        ep *= step;
    }
    for (int j = -1; j >= -J; --j) {
        add(j, em);
        em /= step;
    }
    return out;
}

cplx QPGreensEvaluator::spectral(Vec2 x, Vec2 y) const { return spectral_jet(x, y, 0).g; }

GreensJet QPGreensEvaluator::eval(Vec2 x, Vec2 y, int order) const {
    const Vec2 d = x - y;
    if (std::abs(d.y) >= opt_.dispatch_height) {
        // tail of the spectral series below 1e-16 relative
        const int J = static_cast<int>(std::ceil(k_ + 2.0 + 37.0 / std::abs(d.y)));
        return spectral_jet(x, y, order, std::max(J, opt_.spectral_truncation));
    }
    const double j0 = std::round(d.x / two_pi);
    const Vec2 dr{d.x - two_pi * j0, d.y};
    if (norm(dr) < 1e-12) throw singular_error("Green's function evaluated at a lattice-singular point");
    GreensJet a = free_greens(k_, dr, order);
    const GreensJet b = images_.eval(dr, order);
    const cplx ph = unit_phase(j0 * theta_);
    a.g = ph * (a.g + b.g);
    a.gx = ph * (a.gx + b.gx);
    a.gy = ph * (a.gy + b.gy);
    a.gxx = ph * (a.gxx + b.gxx);
    a.gxy = ph * (a.gxy + b.gxy);
    a.gyy = ph * (a.gyy + b.gyy);
    return a;
}

std::vector<GreensPairCheck> greens_cross_check(int n_pairs, unsigned seed, int n_prime, int J) {
    if (n_pairs < 1 || n_prime < 1 || J < 1) throw domain_error("greens_cross_check: counts must be positive");
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> per(0.0, two_pi), height(-1.0, 1.0), gap(0.3, 2.0), coin(0.0, 1.0);
    std::vector<std::unique_ptr<QPGreensEvaluator>> ev;
    for (double k : {1.0, 2.8}) {
        QPGreensEvaluator::Options o;
        o.lattice_truncation = n_prime;
        o.spectral_truncation = J;
        const double k01 = k * std::sin(0.47);
        const double theta = k01 - std::floor(k01);
        if (wood_distance(k, theta) < 0.05) throw wood_error("greens_cross_check: shift too close to a Wood anomaly");
        ev.push_back(std::make_unique<QPGreensEvaluator>(k, theta, o));
    }
    std::vector<GreensPairCheck> out;
    for (int q = 0; q < n_pairs; ++q) {
        const QPGreensEvaluator& e = *ev[q % 2];
        GreensPairCheck c;
        c.k = e.k();
        c.theta = e.theta();
        c.y = {per(rng), height(rng)};
        const double g = gap(rng);
        c.x = {per(rng), c.y.y + (coin(rng) < 0.5 ? -g : g)};
        c.direct = e.direct(c.x, c.y);
        c.spectral = e.spectral(c.x, c.y);
        c.diff = std::abs(c.direct - c.spectral);
        out.push_back(c);
    }
    return out;
}

}  // namespace qpg

