#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "qpgrating/geometry.hpp"
#include "qpgrating/greens.hpp"
#include "qpgrating/kernels.hpp"

namespace qpg {

/// Mode counts per interface: lambda in the trace basis e~^n, mu in the density basis e^n = e~^n / |z'|.
struct DiscreteBasisSpec {
    std::vector<int> N;

    static DiscreteBasisSpec uniform(int M, int N) { return {std::vector<int>(M, N)}; }
    int dimension() const;
};

struct AssemblyOptions {
    CutoffWindow window;
    ImageMethod images;
    double wood_tolerance = 1e-8;
    int min_samples = 0;            ///< lower bound on the self-block sampling grid
    double cross_decay = 38.0;      ///< cross blocks keep orders with Im(beta_j) * gap <= cross_decay
    bool pointwise_cross = false;   ///< cross blocks by 2D FFT of pointwise kernels instead of separation
    bool kernel_level_difference = true;
    int log_band = -1;              ///< band of the log-weight convolution; -1 picks it from the kernel grid
    int threads = 1;                ///< workers for the self blocks
};

struct AssemblyStats {
    std::uint64_t hankel_evaluations = 0;
    std::uint64_t kernel_points = 0;
    double seconds_self = 0.0;
    double seconds_cross = 0.0;
    int max_samples = 0;
    double max_edge_ratio = 0.0;  ///< largest coefficient magnitude on the outer ring of any self table
};

/// Galerkin matrices with entries (l, m), |l|,|m| <= N, row-major (2N+1)^2:
/// V, K, K' and W for one wavenumber, or the difference of two.
struct SelfOperators {
    int N = 0;
    std::vector<cplx> V, K, Kp, W;

    cplx& operator()(std::vector<cplx>& A, int l, int m) const { return A[(l + N) * (2 * N + 1) + (m + N)]; }
    cplx operator()(const std::vector<cplx>& A, int l, int m) const { return A[(l + N) * (2 * N + 1) + (m + N)]; }
};

/// Shares lattice-sum expansions between blocks with the same wavenumber; safe for concurrent use.
class ExpansionCache {
public:
    std::shared_ptr<const ImageSum> get(double k, double theta);
    std::uint64_t hankel_evaluations() const;

private:
    mutable std::mutex mutex_;
    std::map<std::pair<double, double>, std::shared_ptr<const ImageSum>> cache_;
};

/// Operators of one interface for one wavenumber.
SelfOperators self_operators(const ParametrizedInterface& c, double k, double theta, int N,
                             const AssemblyOptions& opt = {}, AssemblyStats* stats = nullptr,
                             ExpansionCache* cache = nullptr);

/// Difference operators of interface i (0-based) between wavenumbers k_i (above) and k_{i+1} (below).
SelfOperators assemble_self_block(const MediumStack& stack, int i, const DiscreteBasisSpec& spec,
                                  const AssemblyOptions& opt = {}, AssemblyStats* stats = nullptr,
                                  ExpansionCache* cache = nullptr);

/// Traces on interface i of the potentials with densities on interface j, wavenumber of the medium in between.
/// Matrices of size (2N_i+1) x (2N_j+1), row-major.
struct CrossBlock {
    int Ni = 0, Nj = 0;
    std::vector<cplx> SL_D, DL_D, SL_N, DL_N;
};
/// |i - j| != 1 yields a zero block.
CrossBlock assemble_cross_block(const MediumStack& stack, int i, int j, const DiscreteBasisSpec& spec,
                                const AssemblyOptions& opt = {});

/// Pairings of minus the exterior traces of the incident wave on interface 0; zero elsewhere.
std::vector<cplx> incident_rhs(const MediumStack& stack, const DiscreteBasisSpec& spec);

struct BlockSystem {
    enum class Row { dirichlet, neumann };

    DiscreteBasisSpec spec;
    std::vector<int> offset;  ///< first row of each interface block
    int D = 0;
    std::vector<cplx> matrix;  ///< row-major D x D
    std::vector<cplx> rhs;
    AssemblyStats stats;

    int row(int i, Row r, int l) const;
    int col_lambda(int i, int m) const { return row(i, Row::dirichlet, m); }
    int col_mu(int i, int m) const { return row(i, Row::neumann, m); }
    cplx& at(int r, int c) { return matrix[static_cast<std::size_t>(r) * D + c]; }
    cplx at(int r, int c) const { return matrix[static_cast<std::size_t>(r) * D + c]; }
};

BlockSystem assemble_full(const MediumStack& stack, const DiscreteBasisSpec& spec, const AssemblyOptions& opt = {});

/// Binary layout: "QPGM", uint32 version (1), uint64 rows, uint64 cols, rows*cols complex<double> row-major,
/// then rows complex<double> of the right-hand side; little-endian host order.
void dump_system(const BlockSystem& sys, const std::string& path);

}  // namespace qpg
