#pragma once

#include <vector>

#include "polyhho/basis.hpp"

namespace polyhho {

/// Global numbering of hybrid velocity dofs: all cell blocks (2 dim P^k each,
/// component-major), then all face blocks (2(k+1) each, component-major).
struct DofLayout {
    int k = 0;
    std::size_t num_cells = 0;
    std::size_t num_faces = 0;

    DofLayout() = default;
    DofLayout(const PolyMesh& mesh, int k);
    std::size_t cell_block() const { return 2 * dim_pk(k); }
    std::size_t face_block() const { return 2 * static_cast<std::size_t>(k + 1); }
    std::size_t cell_offset(std::size_t c) const { return c * cell_block(); }
    std::size_t face_offset(std::size_t f) const { return num_cells * cell_block() + f * face_block(); }
    std::size_t size() const { return num_cells * cell_block() + num_faces * face_block(); }
    /// Local dof count of a cell with `nf` faces.
    std::size_t local_size(std::size_t nf) const { return cell_block() + nf * face_block(); }

    /// Global index of every local dof of cell c.
    std::vector<std::size_t> local_to_global(const PolyMesh& mesh, std::size_t c) const;
    Eigen::VectorXd gather(const PolyMesh& mesh, std::size_t c, const Eigen::VectorXd& global) const;
};

/// Per-cell HHO operators, all expressed in orthonormal bases.  Local dofs are
/// [v_T comp 0 | v_T comp 1 | face 0 comp 0 | face 0 comp 1 | face 1 ...].
struct LocalOperators {
    std::size_t cell = 0;
    int k = 0;
    std::size_t num_faces = 0;
    ScaledBasis basis;                   ///< orthonormal P^{k+1}(T); prefixes give P^m, m <= k
    std::vector<FaceBasis> face_bases;   ///< per local face, shared with the neighbour
    std::vector<Eigen::Vector2d> normals;  ///< outward per local face

    Eigen::MatrixXd D;      ///< dim P^k x ndofs, coefficients of D_T^k v
    Eigen::MatrixXd Gcell;  ///< 4 dim P^k x ndofs, block (2i+j) holds G_ij = d_j v_i
    Eigen::MatrixXd S;      ///< stabilization Gram matrix
    Eigen::MatrixXd Sfactor;  ///< S = Sfactor^T Sfactor, rows hold the scaled face defects
    Eigen::MatrixXd A;      ///< viscous block |T| Gcell^T Gcell + S
    Eigen::MatrixXd P;      ///< 2 dim P^{k+1} x ndofs, componentwise potential p_T^{k+1}
    Eigen::MatrixXd N1;     ///< Gram matrix of the discrete H^1 seminorm
    Eigen::MatrixXd R;      ///< local dofs -> cell RT dofs (set by the reconstruction)

    std::size_t nk() const { return dim_pk(k); }
    std::size_t cell_dofs() const { return 2 * nk(); }
    std::size_t face_dofs() const { return 2 * static_cast<std::size_t>(k + 1); }
    std::size_t ndofs() const { return cell_dofs() + num_faces * face_dofs(); }
    std::size_t face_index(std::size_t local_face, int comp, std::size_t j) const {
        return cell_dofs() + local_face * face_dofs() + static_cast<std::size_t>(comp) * (k + 1) + j;
    }
    std::size_t cell_index(int comp, std::size_t m) const { return static_cast<std::size_t>(comp) * nk() + m; }

    /// s_T(v, v) from the factored form, accurate to rounding squared.
    double stabilization_value(const Eigen::VectorXd& dofs) const;
    /// v_T evaluated at x.
    Point cell_value(const Eigen::VectorXd& dofs, const Point& x) const;
    /// Rows: 2 components; the 2 x ndofs map dofs -> v_T(x).
    Eigen::Matrix2Xd cell_value_map(const Point& x) const;
    /// 4 x ndofs map dofs -> Gcell(x), row 2i+j.
    Eigen::Matrix4Xd gcell_map(const Point& x) const;
    /// 2 x ndofs map dofs -> v_F(x) on local face i.
    Eigen::Matrix2Xd face_value_map(std::size_t local_face, const Point& x) const;
};

/// Builds D, Gcell, potential, S and A for one cell.
LocalOperators build_local_operators(const PolyMesh& mesh, std::size_t cell, int k);

/// Interpolator: v_T = pi_T^k v, v_F = pi_F^k v.  `extra_degree` is the oversampling for non-polynomial v.
Eigen::VectorXd interpolate_local(const PolyMesh& mesh, const LocalOperators& ops, const VectorField& v,
                                  int extra_degree = 8);
/// Global interpolant in DofLayout numbering.
Eigen::VectorXd interpolate(const PolyMesh& mesh, int k, const VectorField& v, int extra_degree = 8);

/// Gradient reconstruction in P^l(simplex)^{2x2} on each simplex of the subtriangulation.
struct SubmeshGradient {
    int l = 0;
    std::vector<ScaledBasis> bases;   ///< orthonormal P^l per simplex
    std::vector<Eigen::MatrixXd> G;   ///< per simplex: 4 dim P^l x ndofs, block 2i+j
    /// 4 x ndofs map dofs -> Gsub(x) for x in simplex t.
    Eigen::Matrix4Xd map(std::size_t t, const Point& x) const;
};
SubmeshGradient gradient_submesh_op(const PolyMesh& mesh, const LocalOperators& ops, int l);

/// (||grad v_T||^2 + sum_F h_F^{-1} ||v_F - v_T||_F^2)^{1/2}.
double seminorm_1T(const LocalOperators& ops, const Eigen::VectorXd& dofs);
double seminorm_1h(const PolyMesh& mesh, const std::vector<LocalOperators>& ops, const DofLayout& layout,
                   const Eigen::VectorXd& global);

}  // namespace polyhho
