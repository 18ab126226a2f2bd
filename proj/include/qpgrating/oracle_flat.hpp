#pragma once

#include <vector>

#include "qpgrating/geometry.hpp"
#include "qpgrating/postprocess.hpp"

namespace qpg {

/// Closed-form solution for a flat interface x2 = b between eta0 = 1 (above) and eta1 (below).
/// Per mode j the operator symbols (divided by 2 pi) are V = i/(2 beta_j), K = K' = 0, W = -i beta_j/2;
/// only the specular mode j0 = k0 sin(alpha) - theta is forced.
struct FlatAnalyticSolution {
    double k0 = 1.0, eta1 = 1.0, alpha = 0.0, b = 0.0;
    double theta = 0.0;
    int order = 0;  ///< specular mode j0
    cplx beta0, beta1;
    cplx lambda, mu;  ///< density coefficients of mode j0
    cplx R, T;        ///< reflected and transmitted amplitudes referenced to x2 = b

    /// Rayleigh coefficients at the reference heights +H and -H.
    cplx rayleigh_up(double H) const;
    cplx rayleigh_down(double H) const;
    double energy_defect() const;
};

FlatAnalyticSolution flat_solve(double k0, double eta1, double alpha, double b, double wood_tolerance = 1e-8);

struct FlatBase {
    double k0 = 1.0;
    double alpha = 0.47;
    double eta1 = 2.0;
    double b = 0.0;
};

MediumStack flat_stack(const FlatBase& base, double H = 3.0);

/// Base configuration plus ghost interfaces; eta repeats across every ghost. Throws on invariant violations.
MediumStack build_ghost_stack(const FlatBase& base, const std::vector<ParametrizedInterface>& ghosts, double H = 3.0);

/// The documented ghost geometry with 1, 2 or 3 ghost interfaces.
MediumStack ghost_configuration(int n_ghosts);

/// One |sin t|^p ghost interface in the lower medium of the base configuration.
MediumStack regularity_family(double a, double b, int p, const FlatBase& base = FlatBase{});

/// Exact densities of a stack made of one flat physical interface plus ghosts, truncated to modes |j| <= N_i.
DensitySolution ghost_exact_densities(const MediumStack& stack, const DiscreteBasisSpec& spec);

/// Least-squares slope of log(err) against log(N) over the last `last` points.
double fit_loglog_slope(const std::vector<double>& N, const std::vector<double>& err, int last = 5);

}  // namespace qpg
