#include "qpgrating/assembly.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <exception>
#include <fstream>
#include <thread>

#include "qpgrating/spectral_quadrature.hpp"

namespace qpg {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

double max_speed(const ParametrizedInterface& c) {
    double m = 0.0;
    for (int q = 0; q < 512; ++q) m = std::max(m, c.speed(two_pi * q / 512));
    return m;
}

/// Galerkin matrices of ca * (operators at ka) - cb * (operators at kb); kb <= 0 drops the second term.
SelfOperators self_core(const ParametrizedInterface& c, double ka, double kb, double theta, int N,
                        const AssemblyOptions& opt, AssemblyStats* stats, ExpansionCache* cache) {
    const auto t0 = Clock::now();
    auto make = [&](double k) {
        if (opt.images.kind == ImageMethod::Kind::expansion && cache)
            return std::make_unique<SelfKernel>(c, cache->get(k, theta), opt.window, opt.images, opt.wood_tolerance);
        return std::make_unique<SelfKernel>(c, k, theta, opt.window, opt.images, opt.wood_tolerance);
    };
    const auto A = make(ka);
    const auto B = kb > 0.0 ? make(kb) : nullptr;
    int band = A->bandwidth();
    if (B) band = std::max(band, B->bandwidth());
    const int n = FourierGrid::for_modes(N, std::max(2 * (band + 16), opt.min_samples)).n_samples;

    const auto pts = curve_points(c, n);
    const std::size_t nn = static_cast<std::size_t>(n) * n;
    std::vector<std::vector<cplx>> tab(8, std::vector<cplx>(nn));
    std::uint64_t hankel = 0;
    const double ka2 = ka * ka, kb2 = kb * kb;
    for (int p = 0; p < n; ++p) {
        for (int q = 0; q < n; ++q) {
            const std::size_t idx = static_cast<std::size_t>(p) * n + q;
            const SplitValues a = A->at(pts[p], pts[q]);
            hankel += a.hankel;
            cplx v[8] = {a.JV, a.RV, a.JK, a.RK, a.JKp, a.RKp, -ka2 * a.nn * a.JV, -ka2 * a.nn * a.RV};
            if (B) {
                const SplitValues b = B->at(pts[p], pts[q]);
                hankel += b.hankel;
                const cplx w[8] = {b.JV, b.RV, b.JK, b.RK, b.JKp, b.RKp, -kb2 * b.nn * b.JV, -kb2 * b.nn * b.RV};
                for (int r = 0; r < 8; ++r) v[r] -= w[r];
            }
            for (int r = 0; r < 8; ++r) tab[r][idx] = v[r];
        }
    }

    double edge = 0.0;
    std::vector<Coeffs2D> C;
    C.reserve(8);
    for (auto& t : tab) {
        C.emplace_back(std::move(t), n);
        edge = std::max(edge, C.back().edge_ratio());
    }
    tab.clear();

    SelfOperators out;
    out.N = N;
    const std::size_t D = static_cast<std::size_t>(2 * N + 1) * (2 * N + 1);
    out.V.assign(D, 0.0);
    out.K.assign(D, 0.0);
    out.Kp.assign(D, 0.0);
    out.W.assign(D, 0.0);
    std::vector<cplx> nnv(D, 0.0);
    add_log_convolved(C[0], N, LogWeight::S, 1.0, out.V, opt.log_band);
    add_plain(C[1], N, 1.0, out.V);
    add_log_convolved(C[2], N, LogWeight::S1, 1.0, out.K, opt.log_band);
    add_plain(C[3], N, 1.0, out.K);
    add_log_convolved(C[4], N, LogWeight::S1, 1.0, out.Kp, opt.log_band);
    add_plain(C[5], N, 1.0, out.Kp);
    add_log_convolved(C[6], N, LogWeight::S, 1.0, nnv, opt.log_band);
    add_plain(C[7], N, 1.0, nnv);
    for (int l = -N; l <= N; ++l)
        for (int m = -N; m <= N; ++m) {
            const std::size_t i = static_cast<std::size_t>(l + N) * (2 * N + 1) + (m + N);
            out.W[i] = (l + theta) * (m + theta) * out.V[i] + nnv[i];
        }

    if (stats) {
        stats->hankel_evaluations += hankel;
        stats->kernel_points += static_cast<std::uint64_t>(nn) * (B ? 2 : 1);
        stats->max_samples = std::max(stats->max_samples, n);
        stats->max_edge_ratio = std::max(stats->max_edge_ratio, edge);
        stats->seconds_self += seconds_since(t0);
    }
    return out;
}

void subtract(SelfOperators& a, const SelfOperators& b) {
    for (std::size_t i = 0; i < a.V.size(); ++i) {
        a.V[i] -= b.V[i];
        a.K[i] -= b.K[i];
        a.Kp[i] -= b.Kp[i];
        a.W[i] -= b.W[i];
    }
}

}  // namespace

int DiscreteBasisSpec::dimension() const {
    int d = 0;
    for (int n : N) d += 2 * (2 * n + 1);
    return d;
}

std::shared_ptr<const ImageSum> ExpansionCache::get(double k, double theta) {
    const std::lock_guard<std::mutex> lock(mutex_);
    auto key = std::make_pair(k, theta);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    auto e = std::make_shared<const ImageSum>(k, theta, SelfKernel::near_radius());
    cache_.emplace(key, e);
    return e;
}

std::uint64_t ExpansionCache::hankel_evaluations() const {
    const std::lock_guard<std::mutex> lock(mutex_);
    std::uint64_t n = 0;
    for (const auto& [key, e] : cache_) n += e->hankel_evaluations();
    return n;
}

SelfOperators self_operators(const ParametrizedInterface& c, double k, double theta, int N, const AssemblyOptions& opt,
                             AssemblyStats* stats, ExpansionCache* cache) {
    if (N < 0) throw domain_error("self_operators: N must be >= 0");
    return self_core(c, k, -1.0, theta, N, opt, stats, cache);
}

SelfOperators assemble_self_block(const MediumStack& stack, int i, const DiscreteBasisSpec& spec,
                                  const AssemblyOptions& opt, AssemblyStats* stats, ExpansionCache* cache) {
    if (i < 0 || i >= stack.M()) throw domain_error("assemble_self_block: interface index out of range");
    if (static_cast<int>(spec.N.size()) != stack.M()) throw domain_error("assemble_self_block: spec size mismatch");
    const auto sw = derived_shift_and_wavenumbers(stack);
    const double ka = sw.k[i], kb = sw.k[i + 1];
    const int N = spec.N[i];
    check_wood(ka, sw.theta, opt.wood_tolerance, "assemble_self_block");
    check_wood(kb, sw.theta, opt.wood_tolerance, "assemble_self_block");
    if (ka == kb) {
        const std::size_t D = static_cast<std::size_t>(2 * N + 1) * (2 * N + 1);
        return {N, std::vector<cplx>(D), std::vector<cplx>(D), std::vector<cplx>(D), std::vector<cplx>(D)};
    }
    const ParametrizedInterface& c = stack.interfaces[i];
    if (opt.kernel_level_difference) return self_core(c, ka, kb, sw.theta, N, opt, stats, cache);
    SelfOperators a = self_core(c, ka, -1.0, sw.theta, N, opt, stats, cache);
    subtract(a, self_core(c, kb, -1.0, sw.theta, N, opt, stats, cache));
    return a;
}

namespace {

CrossBlock cross_pointwise(const ParametrizedInterface& ci, const ParametrizedInterface& cj, double k, double theta,
                           int Ni, int Nj, int n, const AssemblyOptions& opt) {
    QPGreensEvaluator::Options o;
    o.wood_tolerance = opt.wood_tolerance;
    const QPGreensEvaluator ev(k, theta, o);
    const auto pi_ = curve_points(ci, n), pj = curve_points(cj, n);
    const std::size_t nn = static_cast<std::size_t>(n) * n;
    std::vector<cplx> f[4];
    for (auto& v : f) v.resize(nn);
    for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q) {
            const GreensJet g = ev.eval(pi_[p].z, pj[q].z, 2);
            const cplx ph = std::polar(1.0, -theta * (pi_[p].t - pj[q].t));
            const Vec2 a = pi_[p].nu, b = pj[q].nu;
            const std::size_t idx = static_cast<std::size_t>(p) * n + q;
            f[0][idx] = ph * g.g;
            f[1][idx] = -ph * (g.gx * b.x + g.gy * b.y);
            f[2][idx] = ph * (g.gx * a.x + g.gy * a.y);
            f[3][idx] = -ph * (a.x * (g.gxx * b.x + g.gxy * b.y) + a.y * (g.gxy * b.x + g.gyy * b.y));
        }
    CrossBlock out;
    out.Ni = Ni;
    out.Nj = Nj;
    std::vector<cplx>* dst[4] = {&out.SL_D, &out.DL_D, &out.SL_N, &out.DL_N};
    for (int r = 0; r < 4; ++r) {
        const Coeffs2D C(std::move(f[r]), n);
        dst[r]->resize(static_cast<std::size_t>(2 * Ni + 1) * (2 * Nj + 1));
        for (int l = -Ni; l <= Ni; ++l)
            for (int m = -Nj; m <= Nj; ++m) (*dst[r])[(l + Ni) * (2 * Nj + 1) + (m + Nj)] = C(l, m);
    }
    return out;
}

}  // namespace

CrossBlock assemble_cross_block(const MediumStack& stack, int i, int j, const DiscreteBasisSpec& spec,
                                const AssemblyOptions& opt) {
    if (static_cast<int>(spec.N.size()) != stack.M()) throw domain_error("assemble_cross_block: spec size mismatch");
    if (i < 0 || j < 0 || i >= stack.M() || j >= stack.M())
        throw domain_error("assemble_cross_block: interface index out of range");
    const int Ni = spec.N[i], Nj = spec.N[j];
    CrossBlock out;
    out.Ni = Ni;
    out.Nj = Nj;
    const std::size_t sz = static_cast<std::size_t>(2 * Ni + 1) * (2 * Nj + 1);
    if (std::abs(i - j) != 1) {
        out.SL_D.assign(sz, 0.0);
        out.DL_D.assign(sz, 0.0);
        out.SL_N.assign(sz, 0.0);
        out.DL_N.assign(sz, 0.0);
        return out;
    }
    const auto sw = derived_shift_and_wavenumbers(stack);
    const double theta = sw.theta;
    const double k = sw.k[std::min(i, j) + 1];
    check_wood(k, theta, opt.wood_tolerance, "assemble_cross_block");
    const ParametrizedInterface& ci = stack.interfaces[i];
    const ParametrizedInterface& cj = stack.interfaces[j];
    const int Nmax = std::max(Ni, Nj);
    const double speed = std::max(max_speed(ci), max_speed(cj));
    const int n = FourierGrid::for_modes(Nmax, std::max(opt.min_samples, 2 * static_cast<int>(std::ceil(k * speed + 48.0))))
                      .n_samples;
    if (opt.pointwise_cross) return cross_pointwise(ci, cj, k, theta, Ni, Nj, n, opt);

    // G = sum_r c_r E+_r(x) E-_r(y) with x on interface i, y on interface j
    const double sigma = i < j ? 1.0 : -1.0;
    const auto ri = ci.x2_range(), rj = cj.x2_range();
    const double lo_top = i < j ? ri.min : rj.min, hi_bot = i < j ? rj.max : ri.max;
    const double gap = lo_top - hi_bot;
    if (!(gap > 0.0)) throw geometry_error("assemble_cross_block: adjacent interfaces are not separated in x2");
    const double cref = 0.5 * (lo_top + hi_bot);
    const double jmax = std::sqrt(k * k + std::pow(opt.cross_decay / gap, 2));
    const auto pi_ = curve_points(ci, n), pj = curve_points(cj, n);
    out.SL_D.assign(sz, 0.0);
    out.DL_D.assign(sz, 0.0);
    out.SL_N.assign(sz, 0.0);
    out.DL_N.assign(sz, 0.0);
    std::vector<cplx> fa(n), fa1(n), fb(n), fb1(n);
    std::vector<cplx> a(2 * Ni + 1), a1(2 * Ni + 1), b(2 * Nj + 1), b1(2 * Nj + 1);
    const int W = n / 2 - 1;
    const int rlo = static_cast<int>(std::floor(-jmax - theta)), rhi = static_cast<int>(std::ceil(jmax - theta));
    for (int r = rlo; r <= rhi; ++r) {
        const double rt = r + theta;
        const cplx beta = beta_coeff(k, theta, r);
        if (beta.imag() * gap > opt.cross_decay) continue;
        const cplx cr = I / (4.0 * pi * beta);
        const cplx q1 = rt, q2 = sigma * beta;
        for (int p = 0; p < n; ++p) {
            const CurvePoint& x = pi_[p];
            const cplx e = std::exp(I * (sigma * beta * (x.z.y - cref) + rt * (x.z.x - x.t)));
            fa[p] = e;
            fa1[p] = I * (q1 * x.nu.x + q2 * x.nu.y) * e;
            const CurvePoint& y = pj[p];
            const cplx f = std::exp(-I * (sigma * beta * (y.z.y - cref) + rt * (y.z.x - y.t)));
            fb[p] = f;
            fb1[p] = -I * (q1 * y.nu.x + q2 * y.nu.y) * f;
        }
        // a(l) = int fa e^{-i(l-r)s};  b(m) = int fb e^{-i(r-m)t}
        const int La = Ni + std::abs(r), Lb = Nj + std::abs(r);
        auto A = coeffs_1d(fa, std::min(La, W)), A1 = coeffs_1d(fa1, std::min(La, W));
        auto Bv = coeffs_1d(fb, std::min(Lb, W)), B1 = coeffs_1d(fb1, std::min(Lb, W));
        const int LA = std::min(La, W), LB = std::min(Lb, W);
        double amax = 0.0, bmax = 0.0;
        for (int l = -Ni; l <= Ni; ++l) {
            const int idx = l - r;
            const bool ok = std::abs(idx) <= LA;
            a[l + Ni] = ok ? A[idx + LA] : 0.0;
            a1[l + Ni] = ok ? A1[idx + LA] : 0.0;
            amax = std::max({amax, std::abs(a[l + Ni]), std::abs(a1[l + Ni])});
        }
        for (int m = -Nj; m <= Nj; ++m) {
            const int idx = r - m;
            const bool ok = std::abs(idx) <= LB;
            b[m + Nj] = ok ? Bv[idx + LB] : 0.0;
            b1[m + Nj] = ok ? B1[idx + LB] : 0.0;
            bmax = std::max({bmax, std::abs(b[m + Nj]), std::abs(b1[m + Nj])});
        }
        if (std::abs(cr) * amax * bmax < 1e-300) continue;
        const int Dj = 2 * Nj + 1;
        for (int l = 0; l < 2 * Ni + 1; ++l) {
            const cplx ca = cr * a[l], ca1 = cr * a1[l];
            cplx* sd = &out.SL_D[static_cast<std::size_t>(l) * Dj];
            cplx* dd = &out.DL_D[static_cast<std::size_t>(l) * Dj];
            cplx* sn = &out.SL_N[static_cast<std::size_t>(l) * Dj];
            cplx* dn = &out.DL_N[static_cast<std::size_t>(l) * Dj];
            for (int m = 0; m < Dj; ++m) {
                sd[m] += ca * b[m];
                dd[m] += ca * b1[m];
                sn[m] += ca1 * b[m];
                dn[m] += ca1 * b1[m];
            }
        }
    }
    return out;
}

std::vector<cplx> incident_rhs(const MediumStack& stack, const DiscreteBasisSpec& spec) {
    if (static_cast<int>(spec.N.size()) != stack.M()) throw domain_error("incident_rhs: spec size mismatch");
    std::vector<cplx> rhs(spec.dimension(), 0.0);
    const ParametrizedInterface& c = stack.interfaces.front();
    const int N = spec.N.front();
    const double theta = derived_shift_and_wavenumbers(stack).theta;
    const Vec2 kv = incident_wavevector(stack);
    const int n = FourierGrid::for_modes(N, 4 * static_cast<int>(std::ceil(stack.k0 * max_speed(c) + 32.0))).n_samples;
    std::vector<cplx> fd(n), fn(n);
    for (int p = 0; p < n; ++p) {
        const CurvePoint x = curve_point(c, two_pi * p / n);
        const cplx u = std::polar(1.0, dot(kv, x.z) - theta * x.t);
        fd[p] = -u;
        fn[p] = -I * dot(kv, x.nu) * u;
    }
    const auto d = coeffs_1d(fd, N), g = coeffs_1d(fn, N);
    for (int l = -N; l <= N; ++l) {
        rhs[l + N] = d[l + N];
        rhs[(2 * N + 1) + l + N] = g[l + N];
    }
    return rhs;
}

int BlockSystem::row(int i, Row r, int l) const {
    const int N = spec.N[i];
    return offset[i] + (r == Row::dirichlet ? 0 : 2 * N + 1) + (l + N);
}

BlockSystem assemble_full(const MediumStack& stack, const DiscreteBasisSpec& spec, const AssemblyOptions& opt) {
    const int M = stack.M();
    if (static_cast<int>(spec.N.size()) != M) throw domain_error("assemble_full: spec size mismatch");
    for (int n : spec.N)
        if (n < 1) throw domain_error("assemble_full: mode counts must be >= 1");
    const auto viol = validate_stack(stack);
    if (!viol.empty()) {
        std::string msg = "assemble_full: invalid stack:";
        for (const auto& v : viol) msg += " [" + v.invariant + " on interface " + std::to_string(v.interface + 1) + "]";
        throw geometry_error(msg);
    }
    const auto sw = derived_shift_and_wavenumbers(stack);
    for (std::size_t i = 0; i < sw.k.size(); ++i)
        check_wood(sw.k[i], sw.theta, opt.wood_tolerance, "medium " + std::to_string(i));

    BlockSystem sys;
    sys.spec = spec;
    sys.offset.resize(M);
    int off = 0;
    for (int i = 0; i < M; ++i) {
        sys.offset[i] = off;
        off += 2 * (2 * spec.N[i] + 1);
    }
    sys.D = off;
    sys.matrix.assign(static_cast<std::size_t>(sys.D) * sys.D, 0.0);
    using R = BlockSystem::Row;

    ExpansionCache cache;
    std::vector<SelfOperators> self(M);
    const int T = std::clamp(opt.threads, 1, M);
    std::vector<AssemblyStats> tstats(T);
    std::vector<std::exception_ptr> failed(T);
    auto work = [&](int t) {
        try {
            for (int i = t; i < M; i += T) self[i] = assemble_self_block(stack, i, spec, opt, &tstats[t], &cache);
        } catch (...) {
            failed[t] = std::current_exception();
        }
    };
    if (T == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < T; ++t) pool.emplace_back(work, t);
        for (auto& th : pool) th.join();
    }
    for (int t = 0; t < T; ++t) {
        if (failed[t]) std::rethrow_exception(failed[t]);
        sys.stats.hankel_evaluations += tstats[t].hankel_evaluations;
        sys.stats.kernel_points += tstats[t].kernel_points;
        sys.stats.seconds_self += tstats[t].seconds_self;
        sys.stats.max_samples = std::max(sys.stats.max_samples, tstats[t].max_samples);
        sys.stats.max_edge_ratio = std::max(sys.stats.max_edge_ratio, tstats[t].max_edge_ratio);
    }
    for (int i = 0; i < M; ++i) {
        const int N = spec.N[i];
        const SelfOperators& A = self[i];
        const int D1 = 2 * N + 1;
        for (int l = -N; l <= N; ++l) {
            const int rd = sys.row(i, R::dirichlet, l), rn = sys.row(i, R::neumann, l);
            for (int m = -N; m <= N; ++m) {
                const std::size_t e = static_cast<std::size_t>(l + N) * D1 + (m + N);
                const int cl = sys.col_lambda(i, m), cm = sys.col_mu(i, m);
                sys.at(rd, cl) = -A.K[e];
                sys.at(rd, cm) = A.V[e];
                sys.at(rn, cl) = A.W[e];
                sys.at(rn, cm) = A.Kp[e];
            }
            sys.at(rd, sys.col_lambda(i, l)) -= two_pi;
            sys.at(rn, sys.col_mu(i, l)) -= two_pi;
        }
    }
    sys.stats.hankel_evaluations += cache.hankel_evaluations();

    const auto t0 = Clock::now();
    for (int i = 0; i < M; ++i) {
        for (int j : {i - 1, i + 1}) {
            if (j < 0 || j >= M) continue;
            const CrossBlock B = assemble_cross_block(stack, i, j, spec, opt);
            const double sg = j < i ? 1.0 : -1.0;
            const int Ni = spec.N[i], Nj = spec.N[j];
            for (int l = -Ni; l <= Ni; ++l) {
                const int rd = sys.row(i, R::dirichlet, l), rn = sys.row(i, R::neumann, l);
                for (int m = -Nj; m <= Nj; ++m) {
                    const std::size_t e = static_cast<std::size_t>(l + Ni) * (2 * Nj + 1) + (m + Nj);
                    const int cl = sys.col_lambda(j, m), cm = sys.col_mu(j, m);
                    sys.at(rd, cl) = -sg * B.DL_D[e];
                    sys.at(rd, cm) = sg * B.SL_D[e];
                    sys.at(rn, cl) = -sg * B.DL_N[e];
                    sys.at(rn, cm) = sg * B.SL_N[e];
                }
            }
        }
    }
    sys.stats.seconds_cross += seconds_since(t0);
    sys.rhs = incident_rhs(stack, spec);
    return sys;
}

void dump_system(const BlockSystem& sys, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw resource_error("dump_system: cannot open " + path);
    const char magic[4] = {'Q', 'P', 'G', 'M'};
    const std::uint32_t version = 1;
    const std::uint64_t rows = sys.D, cols = sys.D;
    os.write(magic, 4);
    os.write(reinterpret_cast<const char*>(&version), sizeof version);
    os.write(reinterpret_cast<const char*>(&rows), sizeof rows);
    os.write(reinterpret_cast<const char*>(&cols), sizeof cols);
    os.write(reinterpret_cast<const char*>(sys.matrix.data()), static_cast<std::streamsize>(sys.matrix.size() * sizeof(cplx)));
    os.write(reinterpret_cast<const char*>(sys.rhs.data()), static_cast<std::streamsize>(sys.rhs.size() * sizeof(cplx)));
    if (!os) throw resource_error("dump_system: write failed for " + path);
}

}  // namespace qpg
