#pragma once

#include <string>
#include <vector>

#include <Eigen/SparseLU>

#include "polyhho/forms.hpp"

namespace polyhho {

class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Steady problem nu a_h + t_h + b_h = l_h with Dirichlet data g on the whole boundary.
struct Problem {
    VectorField f = [](const Point&) { return Point(Point::Zero()); };
    VectorField g = [](const Point&) { return Point(Point::Zero()); };
    double nu = 1.;
    bool convection = true;
    int force_degree = -1;  ///< quadrature degree for l_h, < 0 for the default
};

struct SolverConfig {
    double dt0 = 1.;
    double dt_max = 1e12;
    double stop_tol = 1e-11;
    int max_iter = 200;
    Mode mode = Mode::robust;
    double divergence_factor = 1e4;  ///< growth over the best residual declared divergence
    /// The stopping test uses max(stop_tol, floor_factor eps |r|_abs), where |r|_abs is the
    /// norm of the entrywise magnitudes summed into the momentum residual.  0 disables it.
    double floor_factor = 10.;
    bool verbose = false;
};

struct NewtonPTCState {
    Eigen::VectorXd u;  ///< hybrid velocity dofs (DofLayout numbering)
    Eigen::VectorXd p;  ///< pressure dofs, zero mean
    double mu = 0.;     ///< multiplier of the zero-mean constraint
    double dt = 1.;
    double tolerance = 0.;  ///< stopping tolerance actually applied
    std::vector<double> residuals;       ///< momentum residual norm, entry 0 = initial
    std::vector<double> mass_residuals;
    int iterations = 0;
    bool converged = false;
    std::string status;
};

/// Boundary face dofs set to pi_F^k g; other entries unchanged.
Eigen::VectorXd apply_dirichlet(const Discretization& disc, const VectorField& g, Eigen::VectorXd u);
/// true for velocity dofs on boundary faces.
std::vector<bool> dirichlet_mask(const Discretization& disc);

/// Unknown count of the condensed system: free face dofs + one pressure per cell + 1.
std::size_t condensed_size(const Discretization& disc);

/// Newton residual: momentum (zero on Dirichlet dofs), mass and mean constraint.
struct Residual {
    Eigen::VectorXd momentum;
    Eigen::VectorXd mass;
    double mean = 0.;
    Eigen::VectorXd magnitude;  ///< sum of the absolute values of the terms in each momentum entry
};

/// Data shared by residual evaluations and linearized solves.
class NavierStokesSystem {
public:
    NavierStokesSystem(const Discretization& disc, Problem problem, Mode mode);

    const Discretization& discretization() const { return disc_; }
    const Problem& problem() const { return problem_; }
    Mode mode() const { return mode_; }
    const Eigen::VectorXd& body_force(std::size_t c) const { return force_[c]; }

    Residual residual(const Eigen::VectorXd& u, const Eigen::VectorXd& p, double mu) const;

    /// Local linearized block on [velocity dofs | pressure dofs] and its right-hand side -r.
    void local_system(std::size_t c, const Eigen::VectorXd& u, const Eigen::VectorXd& p, double dt,
                      Eigen::MatrixXd& K, Eigen::VectorXd& b) const;

    /// Full uncondensed linearized system on [free velocity | pressure | mu].
    struct Full {
        SparseMatrix K;
        Eigen::VectorXd rhs;
        std::vector<std::size_t> free_velocity;  ///< global velocity dof of each unknown
    };
    Full assemble_full(const Eigen::VectorXd& u, const Eigen::VectorXd& p, double mu, double dt) const;

    /// Statically condensed system on [free face dofs | mean pressure per cell | mu].
    struct Condensed {
        SparseMatrix K;
        Eigen::VectorXd rhs;
        std::vector<std::size_t> face_unknown;  ///< global velocity dof -> condensed index, or npos
        std::vector<Eigen::MatrixXd> recovery;  ///< per cell: internal = X_b - X_R x_R
        std::vector<Eigen::VectorXd> recovery_rhs;
        std::vector<std::vector<std::size_t>> retained;  ///< per cell: condensed index of each retained local unknown
    };
    Condensed static_condense(const Eigen::VectorXd& u, const Eigen::VectorXd& p, double mu, double dt) const;
    /// Expands a condensed solution into increments (du, dp, dmu).
    void recover(const Condensed& sys, const Eigen::VectorXd& x, Eigen::VectorXd& du, Eigen::VectorXd& dp,
                 double& dmu) const;

private:
    const Discretization& disc_;
    Problem problem_;
    Mode mode_;
    std::vector<Eigen::VectorXd> force_;
    std::vector<bool> dirichlet_;
};

/// Sparse LU for the condensed system.  The zero-mean multiplier couples every cell and
/// wrecks the fill of a direct factorization, so it is eliminated instead: mu from the
/// compatibility of the cell-mean mass rows, one pinned mean pressure to remove the
/// constant mode, and the constant mode added back to meet the mean constraint.
class CondensedSolver {
public:
    /// Analyzes the pattern on the first call; later calls reuse it.
    bool factorize(const NavierStokesSystem::Condensed& cs, std::size_t num_cells);
    Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;
    std::string error() const { return lu_.lastErrorMessage(); }

private:
    Eigen::SparseLU<SparseMatrix> lu_;
    bool analyzed_ = false;
    Eigen::Index pin_ = 0;  ///< first cell-mean pressure unknown
    Eigen::Index nc_ = 0;
    Eigen::VectorXd col_;  ///< multiplier column
    Eigen::VectorXd row_;  ///< constraint row
};

/// Pseudo-transient continuation Newton with SER time-step control.  Without convection the
/// problem is linear and plain Newton is used, so dt0 has no effect.
NewtonPTCState ptc_newton_solve(const Discretization& disc, const Problem& problem, const SolverConfig& config,
                                const NewtonPTCState* initial = nullptr);

}  // namespace polyhho
