#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "polyhho/config.hpp"

namespace polyhho {

inline constexpr const char* kVersion = "polyhho 0.1.0";

using TensorField = std::function<Eigen::Matrix2d(const Point&)>;

/// Exact steady solution with Bernoulli pressure p + |u|^2/2 (the pressure of the rotational form).
struct ExactSolution {
    VectorField u;
    TensorField grad_u;  ///< entry (i, j) = d_j u_i
    ScalarField p;
    VectorField f;
};

/// Kovasznay flow on (0,1)^2 for viscosity nu.
ExactSolution kovasznay_solution(double nu);
/// u = (-y, x), nu = 1, f = (3 lambda x^2, 0).
ExactSolution robustness_solution(double lambda);

/// EOC_i = log(e_{i-1}/e_i) / log(h_{i-1}/h_i); empty for the first level, for
/// non-positive or non-finite data and when either error is at or below `roundoff`.
std::vector<std::optional<double>> compute_eoc(const std::vector<double>& errors, const std::vector<double>& h,
                                               double roundoff = 0.);
/// "--" for an empty value, fixed 3 decimals otherwise.
std::string format_eoc(const std::optional<double>& eoc);

struct LevelRow {
    int level = 0;
    std::size_t n_dof = 0;
    double h = 0.;
    double err_energy = 0.;
    std::optional<double> eoc_energy;
    double err_u_l2 = 0.;
    std::optional<double> eoc_u;
    double err_p_l2 = 0.;
    std::optional<double> eoc_p;
    int iters = 0;
    double seconds = 0.;
    bool converged = true;
    std::string status;
};

struct ExperimentReport {
    std::string study;
    std::vector<std::pair<std::string, std::string>> metadata;
    std::vector<LevelRow> rows;
    double roundoff = 0.;  ///< errors at or below this level are rounding noise and get no EOC

    bool all_converged() const;
    /// Fills the EOC columns from the error columns.
    void update_eoc();
    std::string csv() const;
    /// Whitespace separated, gnuplot ready; missing values as NaN.
    std::string dat() const;
    std::string metadata_text() const;
    /// Writes <stem>.csv, <stem>.dat and <stem>.meta into `dir` (created if needed).
    void write(const std::string& dir, const std::string& stem) const;
};

struct StudyOptions {
    int k = 1;
    MeshFamily family = MeshFamily::cartesian;
    int levels = 4;
    std::size_t base_n = 10;  ///< level l uses n = base_n 2^(l-1)
    double nu = 0.025;
    double lambda = 0.;
    SolverConfig solver;
};

/// Level meshes of a study on the unit square.
PolyMesh study_mesh(MeshFamily family, std::size_t base_n, int level);

ExperimentReport run_kovasznay(const StudyOptions& opts);
/// Uses opts.lambda and opts.solver.mode; nu is fixed to 1.
ExperimentReport run_robustness(const StudyOptions& opts);

/// Velocity dofs of a converged robustness solve, for dof-level comparisons.
struct RobustnessSolve {
    Eigen::VectorXd u;
    Eigen::VectorXd p;
    NewtonPTCState state;
    ErrorNorms errors;
};
RobustnessSolve solve_robustness(const Discretization& disc, double lambda, const SolverConfig& config);

struct CavityOptions {
    double re = 100.;
    double lambda = 0.;
    std::string psi = "poly:cubic";
    int k = 1;
    MeshFamily family = MeshFamily::cartesian;
    std::size_t n = 16;
    std::optional<PolyMesh> mesh;  ///< overrides family and n when set
    std::size_t samples = 101;
    bool convection = true;
    SolverConfig solver;
};

struct CavityResult {
    NewtonPTCState state;
    std::size_t n_dof = 0;
    double seconds = 0.;
    std::vector<double> s;   ///< sample coordinate along both centerlines
    std::vector<double> u1;  ///< u_1(1/2, s)
    std::vector<double> u2;  ///< u_2(s, 1/2)
    std::string dat() const;
};
CavityResult run_cavity(const CavityOptions& opts);

/// Cell-polynomial velocity at x (first cell found by the mesh search).
Point sample_velocity(const Discretization& disc, const Eigen::VectorXd& u, const Point& x);

struct PropertyCheck {
    std::string name;
    double value = 0.;
    double tol = 0.;
    bool pass() const { return value <= tol; }
};

struct PropertyOptions {
    std::size_t n = 4;
    std::vector<int> degrees{0, 1, 2};
    int samples = 50;
    unsigned seed = 20240611u;
};

/// Operator invariants on one mesh per family: commutation, divergence preservation,
/// consistency, polynomial exactness, non-dissipativity and velocity invariance.
/// Each check reports the worst value over families and degrees.
std::vector<PropertyCheck> run_property_suite(const PropertyOptions& opts);

}  // namespace polyhho
