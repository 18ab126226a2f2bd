#pragma once

#include <array>
#include <string>
#include <vector>

#include "qpgrating/assembly.hpp"
#include "qpgrating/geometry.hpp"
#include "qpgrating/greens.hpp"

namespace qpg {

/// Per-interface Fourier coefficients: lambda in the trace basis, mu in the density basis.
struct DensitySolution {
    MediumStack stack;
    DiscreteBasisSpec spec;
    std::vector<std::vector<cplx>> lambda, mu;  ///< modes -N_i..N_i

    static DensitySolution zeros(const MediumStack& stack, const DiscreteBasisSpec& spec);
    /// Splits a solution vector laid out as in BlockSystem.
    static DensitySolution from_vector(const MediumStack& stack, const BlockSystem& sys, const std::vector<cplx>& x);
};

/// Nearest point of an interface to x: parameter and Euclidean distance.
struct NearestPoint {
    double t;
    double distance;
};
NearestPoint nearest_point(const ParametrizedInterface& c, Vec2 x);

/// Medium index 0..M containing x (vertical-ray test against the interface graphs).
int classify_point(const MediumStack& stack, Vec2 x);

/// Single- and double-layer potentials of one interface at x, with optional gradients in x.
struct PotentialValues {
    cplx sl{}, dl{};
    std::array<cplx, 2> grad_sl{}, grad_dl{};
};
PotentialValues layer_potentials(const ParametrizedInterface& c, const QPGreensEvaluator& g,
                                 const std::vector<cplx>& lambda, const std::vector<cplx>& mu, Vec2 x,
                                 bool gradients = false);

/// Scattered (or total, adding u^inc in medium 0) field at the points.
std::vector<cplx> field_eval(const DensitySolution& sol, const std::vector<Vec2>& points, bool total = true);

struct RayleighExpansion {
    int J = 0;
    double H = 0.0;
    std::vector<cplx> up, down;          ///< u_j^(0), u_j^(M) for |j| <= J
    std::vector<cplx> beta_up, beta_down;
    std::vector<int> propagating_up, propagating_down;
};

/// Coefficients of u_0 = sum_j u_j e^{i beta_j (x2 - H) + i j_theta x1} above and
/// u_M = sum_j u_j e^{-i beta_j (x2 + H) + i j_theta x1} below, from the densities.
RayleighExpansion rayleigh_coeffs(const DensitySolution& sol, int J = 0);

double energy_balance(const RayleighExpansion& re, const MediumStack& stack);

/// sqrt( sum_i sum_j (1+j_theta^2)^s1 |d lambda|^2 + (1+j_theta^2)^s2 |d mu|^2 ), shorter vectors zero-padded.
double sobolev_error(const DensitySolution& a, const DensitySolution& b, double s1 = 0.5, double s2 = -0.5);

}  // namespace qpg
