#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "qpgrating/assembly.hpp"
#include "qpgrating/geometry.hpp"

namespace qpg::cli {

inline constexpr int schema_version = 1;

inline const std::vector<std::string>& recipes() {
    static const std::vector<std::string> r = {"solve",          "convergence",         "greens-check", "validate-flat",
                                               "validate-ghost", "validate-regularity", "field-grid"};
    return r;
}

struct GreensCheckSpec {
    int pairs = 50;
    int n_prime = 2000;
    int J = 80;
};

struct FieldGridSpec {
    double x1_min = 0.0, x1_max = two_pi;
    int n1 = 64;
    double x2_min = -3.0, x2_max = 3.0;
    int n2 = 64;
    bool total = true;
};

struct RunConfig {
    nlohmann::json echo;  ///< the parsed document, written back to the manifest
    std::string recipe;   ///< optional in the file; must agree with the command line
    std::string stack_builtin;  ///< empty for explicit interfaces
    MediumStack stack;
    std::vector<int> N;       ///< one value (uniform) or one per interface
    std::vector<int> N_list;  ///< sequence for convergence and validation recipes
    int overkill_extra = 50;
    int N_exact = 0;          ///< truncation of closed-form references; 0 picks a recipe default
    AssemblyOptions assembly;
    double tolerance = -1.0;  ///< negative picks the recipe default
    GreensCheckSpec greens;
    FieldGridSpec grid;
    unsigned seed = 2024;
    std::string output;
    int max_dimension = 20000;
};

/// Validates the whole document before anything is computed; throws Error(config) with a path-qualified message.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::string& path);

}  // namespace qpg::cli
