#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "qpgrating/geometry.hpp"
#include "qpgrating/greens.hpp"
#include "qpgrating/spectral_quadrature.hpp"

namespace qpg {

/// S(t) = -(1/2pi) log|2 sin(t/2)|.
double s_log(double t);
/// S1(t) = S(t) sin^2(t).  S1(0) = 0.
double s1_log(double t);

/// C-infinity bump: 1 on [-eps/2, eps/2], 0 outside [-eps, eps] (t taken in (-pi, pi]).
double cutoff_chi(double eps, double t);

/// Cutoff used by the kernel splits.
struct CutoffWindow {
    enum class Kind { bump, trig };
    Kind kind = Kind::trig;
    double eps = pi / 2;  ///< bump width
    int order = 8;        ///< trig: chi = 1 - I_{sin^2(t/2)}(p, p), a trigonometric polynomial of degree 2p-1

    double value(double tau) const;
    /// chi(tau) / cos^2(tau/2), finite on the whole circle.
    double over_cos2(double tau) const;
    /// Fourier bandwidth used to size sampling grids.
    int bandwidth() const;
};

/// Smooth image sum used inside the remainders: expansion (default) or windowed direct sum.
struct ImageMethod {
    enum class Kind { expansion, direct };
    Kind kind = Kind::expansion;
    int direct_terms = 200;  ///< N' for the direct sum
};

/// Geometric data of one curve sample.
struct CurvePoint {
    double t;
    Vec2 z, dz, ddz, nu;  ///< nu = (-z2', z1')
    double speed;
};
CurvePoint curve_point(const ParametrizedInterface& c, double t);
std::vector<CurvePoint> curve_points(const ParametrizedInterface& c, int n);

/// All split factors of the phase-extracted self-interaction kernels at one (s, t).
///   V:  G^ = S J_V + R_V              K:  K^ = S1 J_K + R_K        (grad_y G . nu(t))
///   K': K'^ = S1 J_Kp + R_Kp          nn = nu(s).nu(t)
struct SplitValues {
    cplx JV, RV, JK, RK, JKp, RKp;
    double nn;
    int hankel = 0;  ///< Hankel evaluations spent
};

/// Evaluates the kernel splits of one interface for one wavenumber.
class SelfKernel {
public:
    SelfKernel(const ParametrizedInterface& curve, double k, double theta, CutoffWindow window = {},
               ImageMethod images = {}, double wood_tolerance = 1e-8);
    /// Shares a precomputed lattice-sum expansion for (k, theta); its radius must be >= near_radius().
    SelfKernel(const ParametrizedInterface& curve, std::shared_ptr<const ImageSum> expansion, CutoffWindow window = {},
               ImageMethod images = {}, double wood_tolerance = 1e-8);

    /// Radius of the disc in which the image sum is taken from the lattice-sum expansion.
    static double near_radius();

    /// Split factors at parameters (s, t); `ps` and `pt` are the curve samples at s and t.
    SplitValues at(const CurvePoint& ps, const CurvePoint& pt) const;
    SplitValues at(double s, double t) const;

    double k() const { return k_; }
    double theta() const { return theta_; }
    const CutoffWindow& window() const { return window_; }
    /// Bandwidth estimate of the J factors in either variable.
    int bandwidth() const;

private:
    void init(double wood_tolerance);
    /// Phase-free G + images and its gradient in d, dispatched by |d|.
    GreensJet greens_at(Vec2 d, int& hankel) const;

    const ParametrizedInterface* curve_;
    double k_, theta_;
    CutoffWindow window_;
    ImageMethod method_;
    double max_speed_ = 1.0;
    std::shared_ptr<const ImageSum> expansion_;
    std::unique_ptr<QPGreensEvaluator> far_;
};

/// Generic pointwise split in the form requested for tests: log_factor, remainder and weight tag.
struct KernelSplit {
    std::function<cplx(double, double)> log_factor;
    std::function<cplx(double, double)> remainder;
    LogWeight singular_weight;
};
KernelSplit split_V(std::shared_ptr<const SelfKernel> ker);
KernelSplit split_K(std::shared_ptr<const SelfKernel> ker);
KernelSplit split_Kprime(std::shared_ptr<const SelfKernel> ker);

/// 1/|z'(t)|.
std::function<double(double)> curl_weight(const ParametrizedInterface& c);
/// Samples of curl_Gamma u on t_q = 2 pi q / n for u(z(t)) = sum_j a_j e^{i j_theta t} (modes -N..N),
/// including the quasi-periodic factor.
std::vector<cplx> curl_apply(const ParametrizedInterface& c, const std::vector<cplx>& coeffs, double theta, int n);

}  // namespace qpg
