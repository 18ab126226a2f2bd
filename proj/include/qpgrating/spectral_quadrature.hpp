#pragma once

#include <functional>
#include <vector>

#include "qpgrating/common.hpp"

namespace qpg {

int next_pow2(int n);

/// Modes -N..N sampled on n_samples equispaced points (a power of two).
struct FourierGrid {
    int N = 0;
    int n_samples = 0;

    /// Smallest power of two >= max(4N+4, min_samples).
    static FourierGrid for_modes(int N, int min_samples = 0);
    double t(int q) const { return two_pi * q / n_samples; }
    /// Highest usable mode index of the sample window (Nyquist excluded).
    int window() const { return n_samples / 2 - 1; }
};

/// I1_l = int_0^{2pi} f(t) e^{-ilt} dt for |l| <= L from n equispaced samples.
std::vector<cplx> coeffs_1d(const std::vector<cplx>& samples, int L);
std::vector<cplx> coeffs_1d(const std::function<cplx(double)>& f, const FourierGrid& grid);

/// Two-dimensional coefficient table I2_{l,m} = int int F(s,t) e^{-ils} e^{imt} dt ds.
class Coeffs2D {
public:
    Coeffs2D() = default;
    /// Transforms the n x n row-major samples F(s_p, t_q) in place.
    Coeffs2D(std::vector<cplx>&& samples, int n);

    int n() const { return n_; }
    int window() const { return n_ / 2 - 1; }
    cplx operator()(int l, int m) const {
        return data_[static_cast<std::size_t>(wrap(l)) * n_ + wrap(-m)];
    }
    /// Largest |I2| with max(|l|,|m|) >= window() - ring + 1, relative to the largest |I2| overall.
    double edge_ratio(int ring = 3) const;

private:
    int wrap(int j) const { return ((j % n_) + n_) % n_; }
    int n_ = 0;
    std::vector<cplx> data_;  // already scaled by (2 pi / n)^2
};

Coeffs2D coeffs_2d(const std::function<cplx(double, double)>& F, const FourierGrid& grid);

enum class LogWeight { S, S1 };

/// Fourier coefficient w_n of S (1/(4 pi |n|), w_0 = 0) or of S1 = S sin^2.
double log_weight(LogWeight w, int n);

/// I^S_{l,m} = sum_n w_n I^J_{l+n, m+n} for |l|,|m| <= N, row-major (2N+1)^2.
/// The sum runs over |n| <= B (B < 0: every index inside the coefficient window); a window error is
/// raised when the requested band falls outside the table.
std::vector<cplx> log_convolved_coeffs(const Coeffs2D& J, int N, LogWeight w, int B = -1);

/// Same convolution accumulated into `out` with a complex factor (avoids temporaries in assembly).
void add_log_convolved(const Coeffs2D& J, int N, LogWeight w, cplx factor, std::vector<cplx>& out, int B = -1);
/// out(l,m) += factor * I2_{l,m}.
void add_plain(const Coeffs2D& R, int N, cplx factor, std::vector<cplx>& out);

}  // namespace qpg
