#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "qpgrating/common.hpp"

namespace qpg {

/// sqrt(k^2 - (j+theta)^2) on the branch with Re >= 0, Im >= 0.
cplx beta_coeff(double k, double theta, int j);

struct WoodInfo {
    double distance;
    int j;
};
/// min_j ||j + theta| - k| and the minimizing order.
WoodInfo wood_nearest(double k, double theta);
double wood_distance(double k, double theta);
/// Throws a Wood error naming the offending order when closer than tol.
void check_wood(double k, double theta, double tol, const std::string& who);

/// Smooth lattice-sum window: 1 for |u| <= 1/2, 0 for |u| >= 1, C-infinity in between.
double lattice_window(double u);

/// Value, gradient and Hessian with respect to the first argument x.
struct GreensJet {
    cplx g{};
    cplx gx{}, gy{};
    cplx gxx{}, gxy{}, gyy{};
};

/// Free-space (i/4) H0(k|d|) and derivatives in d; order 0, 1 or 2.
GreensJet free_greens(double k, Vec2 d, int order);

/// Smooth image sum T(d) = sum_{n != 0} e^{-i 2 pi n theta} G^k(d + 2 pi n e1) for |d| <= rho_max,
/// evaluated by Graf's addition theorem from precomputed lattice sums.
class ImageSum {
public:
    ImageSum(double k, double theta, double rho_max, int lattice_terms = 0);

    GreensJet eval(Vec2 d, int order) const;
    double k() const { return k_; }
    double theta() const { return theta_; }
    double rho_max() const { return rho_max_; }
    int order() const { return M_; }
    int lattice_terms() const { return n_lattice_; }
    std::uint64_t hankel_evaluations() const { return hankel_evals_; }

    /// Number of lattice terms used by default for a given Wood distance.
    static int default_lattice_terms(double wood);

private:
    int terms_for(double rho) const;

    double k_, theta_, rho_max_;
    int M_ = 0;
    int n_lattice_ = 0;
    std::vector<cplx> sigma_;  // sigma_m for m in [-M, M], stored at m + M
    std::uint64_t hankel_evals_ = 0;
};

/// Windowed direct image sum over 0 < |n| <= N' (same quantity as ImageSum::eval).
GreensJet direct_image_sum(double k, double theta, Vec2 d, int n_prime, int order, bool windowed = true);

class QPGreensEvaluator {
public:
    struct Options {
        int lattice_truncation = 200;  ///< N'
        int spectral_truncation = 80;  ///< J
        double wood_tolerance = 1e-8;
        bool windowed = true;
        double dispatch_height = 0.3;
    };

    QPGreensEvaluator(double k, double theta, Options opt);
    QPGreensEvaluator(double k, double theta) : QPGreensEvaluator(k, theta, Options{}) {}

    double k() const { return k_; }
    double theta() const { return theta_; }
    const Options& options() const { return opt_; }

    /// Symmetric partial lattice sum over |n| <= N'.
    cplx direct(Vec2 x, Vec2 y) const;
    /// Gradient in y of the partial lattice sum.
    std::array<cplx, 2> direct_grad_y(Vec2 x, Vec2 y) const;
    /// Spectral (Rayleigh) representation truncated at |j| <= J.
    cplx spectral(Vec2 x, Vec2 y) const;
    GreensJet spectral_jet(Vec2 x, Vec2 y, int order, int J = 0) const;
    /// Accurate evaluation: spectral when |x2 - y2| >= dispatch height, otherwise nearest image
    /// in closed form plus the lattice-sum expansion of the remaining images.
    GreensJet eval(Vec2 x, Vec2 y, int order) const;

    const ImageSum& images() const { return images_; }

private:
    double k_, theta_;
    Options opt_;
    ImageSum images_;
};

/// One point pair of the direct/spectral cross-representation grid.
struct GreensPairCheck {
    double k = 0.0, theta = 0.0;
    Vec2 x, y;
    cplx direct, spectral;
    double diff = 0.0;
};

/// Random pairs with |x2 - y2| in [0.3, 2], alternating k = 1 and k = 2.8 (theta from incidence 0.47),
/// comparing the windowed lattice sum (N') with the spectral series (J).
std::vector<GreensPairCheck> greens_cross_check(int n_pairs = 50, unsigned seed = 2024, int n_prime = 2000, int J = 80);

}  // namespace qpg
