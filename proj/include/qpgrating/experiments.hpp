#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qpgrating/assembly.hpp"
#include "qpgrating/postprocess.hpp"

namespace qpg {

/// Refraction indices of the 12-layer grating, row 1 or 2, top to bottom.
const std::vector<double>& table1_eta(int row);

/// Twelve sinusoidal interfaces x2 = (-1)^i 0.2 sin t + 0.6 (5.5 - i), i = 0..11, below vacuum.
MediumStack table1_stack(double k0, int row = 1, double alpha = 0.47);

struct SolveOptions {
    AssemblyOptions assembly;
    bool condition = false;  ///< 1-norm condition estimate
    bool residual = false;   ///< relative residual (keeps a copy of the matrix)
    std::string dump_path;   ///< binary dump of the system when non-empty
    int max_dimension = 0;   ///< resource cap on D; 0 disables it
};

struct SolveOutcome {
    DensitySolution solution;
    AssemblyStats stats;
    int D = 0;
    double condition = -1.0;  ///< negative when not requested
    double residual = -1.0;
    double seconds_assembly = 0.0;
    double seconds_solve = 0.0;
};

SolveOutcome solve_stack(const MediumStack& stack, const DiscreteBasisSpec& spec, const SolveOptions& opt = {});

struct ConvergencePoint {
    int N = 0;
    int D = 0;
    double error = 0.0;          ///< energy-norm distance to the reference
    double energy_defect = 0.0;
    double seconds = 0.0;
    std::uint64_t hankel_evaluations = 0;
};

struct ConvergenceStudy {
    std::vector<ConvergencePoint> points;
    int reference_N = 0;  ///< 0 for a closed-form reference
    double reference_energy_defect = -1.0;
    double seconds = 0.0;
};

/// Errors of uniform-N solutions against a given reference.
ConvergenceStudy convergence_against(const MediumStack& stack, const std::vector<int>& Ns,
                                     const DensitySolution& reference, const SolveOptions& opt = {});

/// Errors against an overkill solution with N_max + extra modes per interface.
ConvergenceStudy self_convergence(const MediumStack& stack, const std::vector<int>& Ns, int extra = 50,
                                  const SolveOptions& opt = {});

/// Ghost configuration with 1..3 ghosts against its exact densities.
ConvergenceStudy ghost_study(int n_ghosts, const std::vector<int>& Ns, const SolveOptions& opt = {});

/// |sin t|^p ghost interface against its exact densities truncated at N_exact.
ConvergenceStudy regularity_study(int p, const std::vector<int>& Ns, const SolveOptions& opt = {}, double a = 1.0,
                                  double b = -2.0, int N_exact = 4096);

/// Log-log least-squares slopes over consecutive windows of `width` points.
std::vector<double> window_slopes(const std::vector<double>& N, const std::vector<double>& err, int width = 3);

/// No error exceeds factor times the smallest preceding error; values below floor count as floor.
bool decays_monotonically(const std::vector<double>& err, double factor = 3.0, double floor = 1e-10);

/// Hankel evaluations of a direct-image assembly with N' = terms_per_mode * N.
struct HankelCount {
    int N = 0;
    int direct_terms = 0;
    int samples = 0;
    std::uint64_t hankel_evaluations = 0;
    double seconds = 0.0;
};
HankelCount hankel_count(const MediumStack& stack, int N, int terms_per_mode = 4);

}  // namespace qpg
