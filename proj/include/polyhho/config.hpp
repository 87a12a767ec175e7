#pragma once

#include <string>

#include "polyhho/solver.hpp"

namespace polyhho {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Scalar potential psi with its gradient, used for irrotational forcing lambda grad psi.
struct Potential {
    std::string id;
    ScalarField psi;
    VectorField grad;
    int degree = 0;
};

/// `poly:<id>` with id in {zero, x3, quadratic, cubic}; cubic = (x^3 + y^3)/3.
Potential potential_by_id(const std::string& name);

/// Solver run configuration; every key is optional.
struct RunConfig {
    int k = 1;
    double nu = 1.;
    double lambda = 0.;
    std::string psi = "poly:zero";
    SolverConfig solver;
};

/// key=value lines; '#' starts a comment.  Keys: k, nu, dt0, stop_tol, max_iter, mode, lambda, psi.
RunConfig parse_config_string(const std::string& text);
RunConfig load_config(const std::string& path);
std::string to_config_string(const RunConfig& cfg);

}  // namespace polyhho
