#pragma once

#include "polyhho/hho_local.hpp"

namespace polyhho {

class RTError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raviart-Thomas space of degree k on the subtriangulation of one cell.
/// Cell-level dof layout: [cell faces, k+1 normal moments each, in loop order |
/// interior subfaces, k+1 each | per simplex 2 dim P^{k-1} interior moments].
/// Normal moments are (1/|s|) int_s (w.n_s) phi_j with the global face normal on
/// cell faces and the stored orientation on interior subfaces.
class RTSpace {
public:
    RTSpace() = default;
    RTSpace(const PolyMesh& mesh, std::size_t cell, int k);

    int degree() const { return k_; }
    std::size_t cell() const { return cell_; }
    std::size_t num_simplices() const { return simplices_.size(); }
    std::size_t size() const { return size_; }
    std::size_t num_boundary_dofs() const { return nbd_; }
    /// Dofs of the zero-normal-trace subspace: indices [num_boundary_dofs(), size()).
    std::size_t num_free_dofs() const { return size_ - nbd_; }
    std::size_t local_size() const { return static_cast<std::size_t>((k_ + 1) * (k_ + 3)); }
    const std::vector<std::size_t>& dof_map(std::size_t t) const { return simplices_[t].map; }

    /// 2 x size(): value of every cell-level nodal function at x in simplex t.
    Eigen::Matrix2Xd values(std::size_t t, const Point& x) const;
    /// 1 x size(): divergence of every cell-level nodal function at x in simplex t.
    Eigen::RowVectorXd divergence(std::size_t t, const Point& x) const;
    /// Simplex-local nodal values (2 x local_size()) and divergence.
    Eigen::Matrix2Xd local_values(std::size_t t, const Point& x) const;
    Eigen::RowVectorXd local_divergence(std::size_t t, const Point& x) const;
    /// 2-norm condition number of the simplex Vandermonde matrix.
    double vandermonde_condition(std::size_t t) const { return simplices_[t].cond; }

    Point evaluate(const Eigen::VectorXd& coeffs, std::size_t t, const Point& x) const;
    double evaluate_divergence(const Eigen::VectorXd& coeffs, std::size_t t, const Point& x) const;

private:
    struct SimplexData {
        ScaledBasis raw;          ///< scaled monomials of degree k
        Eigen::MatrixXd C;        ///< spanning coefficients of the nodal basis (column d = nodal function d)
        std::vector<std::size_t> map;
        double cond = 0.;
    };
    void spanning(const SimplexData& s, const Point& x, Eigen::Matrix2Xd* val, Eigen::RowVectorXd* div) const;

    int k_ = 0;
    std::size_t cell_ = 0;
    std::size_t size_ = 0;
    std::size_t nbd_ = 0;
    std::vector<SimplexData> simplices_;
};

/// Lifting of the face normal traces: matrix (rt.size() x ndofs) with zero interior
/// subface and interior moment dofs.
Eigen::MatrixXd boundary_lifting(const PolyMesh& mesh, const RTSpace& rt, const LocalOperators& ops);

/// Matrix of the divergence-preserving reconstruction, local dofs -> cell RT dofs,
/// obtained from the lifting plus the reduced mixed problem on the zero-trace space.
/// Throws RTError on a singular local system or a failed residual check.
Eigen::MatrixXd reconstruction_map(const PolyMesh& mesh, const LocalOperators& ops, const RTSpace& rt);

/// Same construction applied to a single dof vector.
Eigen::VectorXd solve_local_mixed(const PolyMesh& mesh, const LocalOperators& ops, const RTSpace& rt,
                                  const Eigen::VectorXd& dofs);

/// Piecewise RT field over all cells of a mesh.
class RTField {
public:
    RTField(const PolyMesh& mesh, const std::vector<RTSpace>& spaces, std::vector<Eigen::VectorXd> coeffs);
    Point value(std::size_t cell, std::size_t simplex, const Point& x) const;
    double divergence(std::size_t cell, std::size_t simplex, const Point& x) const;
    /// Point evaluation with cell/simplex search; throws RTError outside the mesh.
    Point value(const Point& x) const;
    const Eigen::VectorXd& coefficients(std::size_t cell) const { return coeffs_[cell]; }

private:
    const PolyMesh* mesh_;
    const std::vector<RTSpace>* spaces_;
    std::vector<Eigen::VectorXd> coeffs_;
};

/// R_h v: per cell R_T applied to the gathered dofs.
RTField global_reconstruction(const PolyMesh& mesh, const std::vector<LocalOperators>& ops,
                              const std::vector<RTSpace>& spaces, const DofLayout& layout, const Eigen::VectorXd& global);

}  // namespace polyhho
