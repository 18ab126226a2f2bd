#include "qpgrating/spectral_quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include <fftw3.h>

namespace qpg {

namespace {

std::mutex& plan_mutex() {
    static std::mutex m;
    return m;
}

void fft_inplace(cplx* data, int rank, const int* dims) {
    auto* p = reinterpret_cast<fftw_complex*>(data);
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(plan_mutex());
        plan = fftw_plan_dft(rank, dims, p, p, FFTW_FORWARD, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    std::lock_guard<std::mutex> lock(plan_mutex());
    fftw_destroy_plan(plan);
}

}  // namespace

int next_pow2(int n) {
    int p = 1;
    while (p < n) p <<= 1;
    return p;
}

FourierGrid FourierGrid::for_modes(int N, int min_samples) {
    if (N < 0) throw domain_error("FourierGrid: N must be >= 0");
    return {N, next_pow2(std::max(4 * N + 4, min_samples))};
}

std::vector<cplx> coeffs_1d(const std::vector<cplx>& samples, int L) {
    const int n = static_cast<int>(samples.size());
    if (2 * L + 1 > n) throw window_error("coeffs_1d: too few samples for the requested modes");
    std::vector<cplx> x(samples);
    fft_inplace(x.data(), 1, &n);
    std::vector<cplx> out(2 * L + 1);
    const double h = two_pi / n;
    for (int l = -L; l <= L; ++l) out[l + L] = h * x[((l % n) + n) % n];
    return out;
}

std::vector<cplx> coeffs_1d(const std::function<cplx(double)>& f, const FourierGrid& g) {
    std::vector<cplx> s(g.n_samples);
    for (int q = 0; q < g.n_samples; ++q) s[q] = f(g.t(q));
    return coeffs_1d(s, g.N);
}

Coeffs2D::Coeffs2D(std::vector<cplx>&& samples, int n) : n_(n), data_(std::move(samples)) {
    if (static_cast<std::size_t>(n) * n != data_.size()) throw domain_error("Coeffs2D: sample size mismatch");
    const int dims[2] = {n, n};
    fft_inplace(data_.data(), 2, dims);
    const double h2 = (two_pi / n) * (two_pi / n);
    for (auto& v : data_) v *= h2;
}

double Coeffs2D::edge_ratio(int ring) const {
    const int W = window();
    double all = 0.0, edge = 0.0;
    for (int l = -W; l <= W; ++l)
        for (int m = -W; m <= W; ++m) {
            const double a = std::abs((*this)(l, m));
            all = std::max(all, a);
            if (std::max(std::abs(l), std::abs(m)) > W - ring) edge = std::max(edge, a);
        }
    return all > 0.0 ? edge / all : 0.0;
}

Coeffs2D coeffs_2d(const std::function<cplx(double, double)>& F, const FourierGrid& g) {
    const int n = g.n_samples;
    std::vector<cplx> s(static_cast<std::size_t>(n) * n);
    for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q) s[static_cast<std::size_t>(p) * n + q] = F(g.t(p), g.t(q));
    return Coeffs2D(std::move(s), n);
}

double log_weight(LogWeight w, int n) {
    auto w0 = [](int j) { return j == 0 ? 0.0 : 1.0 / (4.0 * pi * std::abs(j)); };
    if (w == LogWeight::S) return w0(n);
    return (2.0 * w0(n) - w0(n + 2) - w0(n - 2)) / 4.0;
}

void add_log_convolved(const Coeffs2D& J, int N, LogWeight w, cplx factor, std::vector<cplx>& out, int B) {
    const int W = J.window();
    if (N > W) throw window_error("log_convolved_coeffs: mode range exceeds the coefficient window");
    if (B >= 0 && N + B > W)
        throw window_error("log_convolved_coeffs: convolution band |n| <= " + std::to_string(B) +
                           " not covered by the coefficient window " + std::to_string(W));
    const int nb = 2 * W + 1;
    std::vector<double> wt(2 * nb + 1);
    for (int n = -nb; n <= nb; ++n) wt[n + nb] = log_weight(w, n);
    const int D = 2 * N + 1;
    for (int l = -N; l <= N; ++l) {
        for (int m = -N; m <= N; ++m) {
            int lo = std::max(-W - l, -W - m), hi = std::min(W - l, W - m);
            if (B >= 0) {
                lo = std::max(lo, -B);
                hi = std::min(hi, B);
            }
            cplx acc(0.0);
            for (int n = lo; n <= hi; ++n) acc += wt[n + nb] * J(l + n, m + n);
            out[static_cast<std::size_t>(l + N) * D + (m + N)] += factor * acc;
        }
    }
}

std::vector<cplx> log_convolved_coeffs(const Coeffs2D& J, int N, LogWeight w, int B) {
    std::vector<cplx> out(static_cast<std::size_t>(2 * N + 1) * (2 * N + 1), cplx(0.0));
    add_log_convolved(J, N, w, 1.0, out, B);
    return out;
}

void add_plain(const Coeffs2D& R, int N, cplx factor, std::vector<cplx>& out) {
    const int D = 2 * N + 1;
    if (N > R.window()) throw window_error("add_plain: mode range exceeds the coefficient window");
    for (int l = -N; l <= N; ++l)
        for (int m = -N; m <= N; ++m) out[static_cast<std::size_t>(l + N) * D + (m + N)] += factor * R(l, m);
}

}  // namespace qpg
