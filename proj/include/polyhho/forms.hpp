#pragma once

#include <Eigen/Sparse>

#include "polyhho/rt_reconstruction.hpp"

namespace polyhho {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// robust: body force tested with the RT reconstruction, rotational-form convection on R;
/// classic: body force tested with the cell polynomial, skew-symmetric convective form on the
/// cell polynomials (non pressure-robust reference method).
enum class Mode { robust, classic };
Mode parse_mode(const std::string& name);
std::string mode_name(Mode m);

/// Maps from local dofs to point values at the quadrature nodes used by the
/// trilinear form (cell degree 3k+2, face degree 3k+2).
struct CellQuadData {
    std::vector<double> w;
    std::vector<Eigen::Matrix2Xd> R;  ///< reconstruction values
    std::vector<Eigen::Matrix2Xd> V;  ///< cell polynomial values
    std::vector<Eigen::Matrix4Xd> G;  ///< gradient of the cell polynomial, row 2i+j = d_j v_i
    std::vector<double> fw;
    std::vector<Point> fn;            ///< outward normal
    std::vector<Eigen::Matrix2Xd> fR, fV;
    std::vector<Eigen::Matrix2Xd> fD;  ///< v_F - v_T
};

/// Mesh, degree, dof layout and all cached per-cell operators.
class Discretization {
public:
    Discretization(PolyMesh mesh, int k);

    const PolyMesh& mesh() const { return mesh_; }
    int k() const { return k_; }
    const DofLayout& layout() const { return layout_; }
    const LocalOperators& ops(std::size_t c) const { return ops_[c]; }
    const std::vector<LocalOperators>& all_ops() const { return ops_; }
    const RTSpace& rt(std::size_t c) const { return rt_[c]; }
    const std::vector<RTSpace>& all_rt() const { return rt_; }
    const CellQuadData& quad(std::size_t c) const { return quad_[c]; }

    std::size_t num_velocity_dofs() const { return layout_.size(); }
    /// Pressure: dim P^k per cell, orthonormal cell basis.
    std::size_t num_pressure_dofs() const { return mesh_.num_cells() * dim_pk(k_); }
    std::size_t pressure_offset(std::size_t c) const { return c * dim_pk(k_); }

    RTField reconstruct(const Eigen::VectorXd& u) const;

private:
    PolyMesh mesh_;
    int k_;
    DofLayout layout_;
    std::vector<LocalOperators> ops_;
    std::vector<RTSpace> rt_;
    std::vector<CellQuadData> quad_;
};

/// nu-free viscous matrix sum_T scatter(A_T).
SparseMatrix assemble_viscous(const Discretization& disc);
/// Coupling matrix B with b_h(v, q) = q^T B v = -sum_T int_T D_T v q_T.
SparseMatrix assemble_coupling(const Discretization& disc);
/// Local coupling block -|T| D_T.
Eigen::MatrixXd local_coupling(const Discretization& disc, std::size_t c);

/// l_h(f, v) for every velocity dof.  degree < 0 selects 2k + 8.
Eigen::VectorXd assemble_body_force(const Discretization& disc, const VectorField& f, Mode mode, int degree = -1);
Eigen::VectorXd local_body_force(const Discretization& disc, std::size_t c, const VectorField& f, Mode mode, int degree = -1);

/// t_h(w, v, z).
double trilinear_apply(const Discretization& disc, const Eigen::VectorXd& w, const Eigen::VectorXd& v,
                       const Eigen::VectorXd& z, Mode mode);
/// Local t_T(u, u, .) and optionally its Jacobian with respect to u.
void local_convection(const Discretization& disc, std::size_t c, const Eigen::VectorXd& u_local, Mode mode,
                      Eigen::VectorXd* residual, Eigen::MatrixXd* jacobian);
/// Global t_h(u, u, .) and its Jacobian.
Eigen::VectorXd convection_residual(const Discretization& disc, const Eigen::VectorXd& u, Mode mode);
SparseMatrix trilinear_jacobian(const Discretization& disc, const Eigen::VectorXd& u, Mode mode);

/// Pressure interpolation pi_h^k p, shifted to zero mean.
Eigen::VectorXd project_pressure(const Discretization& disc, const ScalarField& p, int extra_degree = 8);
/// int_Omega p_h
double pressure_integral(const Discretization& disc, const Eigen::VectorXd& p);

struct ErrorNorms {
    double energy = 0.;       ///< (nu a_h(e, e))^{1/2}, e = u_h - I_h u
    double l2_velocity = 0.;  ///< ||u_T - pi_T^k u|| over all cells
    double l2_pressure = 0.;  ///< ||p_h - pi_h^k p|| after zero-mean normalisation of both
};
ErrorNorms error_norms(const Discretization& disc, const Eigen::VectorXd& u_h, const Eigen::VectorXd& p_h,
                       const VectorField& u, const ScalarField& p, double nu);

}  // namespace polyhho
