#include "qpgrating/linalg.hpp"

#include <cmath>
#include <string>

#include <lapacke.h>

namespace qpg {

namespace {

lapack_complex_double* lp(cplx* p) { return reinterpret_cast<lapack_complex_double*>(p); }
const lapack_complex_double* lp(const cplx* p) { return reinterpret_cast<const lapack_complex_double*>(p); }

}  // namespace

Factorization lu_factor(std::vector<cplx>&& matrix, int dim) {
    if (dim < 1 || matrix.size() != static_cast<std::size_t>(dim) * dim)
        throw domain_error("lu_factor: matrix is not square with the given dimension");
    Factorization f;
    f.dim = dim;
    // row-major A is column-major A^T; the 1-norm of A is the infinity norm of A^T
    for (int c = 0; c < dim; ++c) {
        double s = 0.0;
        for (int r = 0; r < dim; ++r) {
            const cplx v = matrix[static_cast<std::size_t>(r) * dim + c];
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw numerical_error("lu_factor: non-finite entry");
            s += std::abs(v);
        }
        f.anorm1 = std::max(f.anorm1, s);
    }
    f.lu = std::move(matrix);
    f.pivots.resize(dim);
    const lapack_int info = LAPACKE_zgetrf(LAPACK_COL_MAJOR, dim, dim, lp(f.lu.data()), dim, f.pivots.data());
    if (info < 0) throw numerical_error("lu_factor: invalid argument " + std::to_string(-info));
    if (info > 0) throw numerical_error("lu_factor: singular matrix (zero pivot at " + std::to_string(info) + ")");
    for (int i = 0; i < dim; ++i)
        if (std::abs(f.lu[static_cast<std::size_t>(i) * dim + i]) < 1e-300)
            throw numerical_error("lu_factor: singular matrix (pivot below 1e-300)");
    return f;
}

Factorization lu_factor(const std::vector<cplx>& matrix, int dim) { return lu_factor(std::vector<cplx>(matrix), dim); }

std::vector<cplx> solve(const Factorization& f, const std::vector<cplx>& rhs) {
    if (static_cast<int>(rhs.size()) != f.dim) throw domain_error("solve: right-hand side dimension mismatch");
    std::vector<cplx> x(rhs);
    // A x = b  <=>  (A^T)^T x = b
    const lapack_int info = LAPACKE_zgetrs(LAPACK_COL_MAJOR, 'T', f.dim, 1, lp(f.lu.data()), f.dim, f.pivots.data(),
                                           lp(x.data()), f.dim);
    if (info != 0) throw numerical_error("solve: zgetrs failed");
    return x;
}

double condition_estimate(const Factorization& f) {
    // kappa_1(A) = kappa_inf(A^T)
    double rcond = 0.0;
    const lapack_int info = LAPACKE_zgecon(LAPACK_COL_MAJOR, 'I', f.dim, lp(f.lu.data()), f.dim, f.anorm1, &rcond);
    if (info != 0) throw numerical_error("condition_estimate: zgecon failed");
    return rcond > 0.0 ? 1.0 / rcond : INFINITY;
}

double relative_residual(const std::vector<cplx>& A, int dim, const std::vector<cplx>& x, const std::vector<cplx>& b) {
    double num = 0.0, den = 0.0;
    for (int r = 0; r < dim; ++r) {
        cplx acc(0.0);
        const cplx* row = &A[static_cast<std::size_t>(r) * dim];
        for (int c = 0; c < dim; ++c) acc += row[c] * x[c];
        num += std::norm(acc - b[r]);
        den += std::norm(b[r]);
    }
    return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

}  // namespace qpg
