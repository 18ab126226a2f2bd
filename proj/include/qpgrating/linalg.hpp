#pragma once

#include <vector>

#include "qpgrating/common.hpp"

namespace qpg {

/// Partial-pivoted LU of a dense complex matrix given in row-major order.
struct Factorization {
    int dim = 0;
    std::vector<cplx> lu;     ///< factors of A^T in column-major order (the row-major input, untouched layout)
    std::vector<int> pivots;  ///< LAPACK pivot indices (1-based)
    double anorm1 = 0.0;      ///< 1-norm of A
};

/// Consumes the matrix (moved in to avoid copying large systems).
Factorization lu_factor(std::vector<cplx>&& matrix, int dim);
Factorization lu_factor(const std::vector<cplx>& matrix, int dim);

std::vector<cplx> solve(const Factorization& f, const std::vector<cplx>& rhs);

/// 1-norm condition number estimate (Hager-Higham).
double condition_estimate(const Factorization& f);

/// Relative residual ||A x - b|| / ||b|| (2-norms), A row-major.
double relative_residual(const std::vector<cplx>& A, int dim, const std::vector<cplx>& x, const std::vector<cplx>& b);

}  // namespace qpg
