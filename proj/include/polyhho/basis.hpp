#pragma once

#include <functional>

#include "polyhho/quadrature.hpp"

namespace polyhho {

class BasisError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// dim P^k in two variables; 0 for k < 0.
inline std::size_t dim_pk(int k) { return k < 0 ? 0 : static_cast<std::size_t>((k + 1) * (k + 2) / 2); }

using ScalarField = std::function<double(const Point&)>;
using VectorField = std::function<Point(const Point&)>;

/// Basis of P^l on a 2D support, built from monomials in (x - center)/h ordered by
/// total degree.  When orthonormalized, (1/|X|) int_X phi_i phi_j = delta_ij and the
/// first dim_pk(m) functions span P^m for every m <= l.
class ScaledBasis {
public:
    ScaledBasis() = default;
    /// Raw scaled monomials.
    ScaledBasis(int degree, const Point& center, double h);
    /// Orthonormalized against `rule` (two Cholesky passes). Throws BasisError on a singular Gram matrix.
    ScaledBasis(int degree, const Point& center, double h, const QuadRule& rule);

    int degree() const { return degree_; }
    std::size_t size() const { return dim_pk(degree_); }
    const Point& center() const { return center_; }
    double h() const { return h_; }
    double measure() const { return measure_; }
    /// Row i holds the monomial coefficients of basis function i (lower triangular).
    const Eigen::MatrixXd& coefficients() const { return coef_; }

    Eigen::VectorXd values(const Point& x) const;
    /// Row i = gradient of basis function i.
    Eigen::MatrixX2d gradients(const Point& x) const;
    void eval(const Point& x, Eigen::VectorXd& val, Eigen::MatrixX2d& grad) const;

private:
    void monomials(const Point& x, Eigen::VectorXd& m, Eigen::MatrixX2d* dm) const;

    int degree_ = 0;
    Point center_ = Point::Zero();
    double h_ = 1.;
    double measure_ = 1.;
    Eigen::MatrixXd coef_;
};

/// Orthonormal Legendre basis of P^l on a segment a -> b: (1/|F|) int_F phi_i phi_j = delta_ij.
class FaceBasis {
public:
    FaceBasis() = default;
    FaceBasis(int degree, const Point& a, const Point& b);
    int degree() const { return degree_; }
    std::size_t size() const { return static_cast<std::size_t>(degree_ + 1); }
    double length() const { return length_; }
    Eigen::VectorXd values(const Point& x) const;

private:
    int degree_ = 0;
    Point mid_ = Point::Zero();
    Point tangent_ = Point::UnitX();
    double length_ = 1.;
};

/// Generators of the Koszul complement (x - x_T)^perp P^{k-1}(T); empty for k <= 0.
class KoszulBasis {
public:
    KoszulBasis() = default;
    /// `cell_basis` must be orthonormal of degree >= k-1; its first dim_pk(k-1) functions are used.
    KoszulBasis(int k, const Point& apex, const ScaledBasis& cell_basis);
    int degree() const { return k_; }
    std::size_t size() const { return dim_pk(k_ - 1); }
    /// Column j = generator j evaluated at x.
    Eigen::Matrix2Xd values(const Point& x) const;

private:
    int k_ = 0;
    Point apex_ = Point::Zero();
    ScaledBasis basis_;
};

ScaledBasis cell_basis(const PolyMesh& mesh, std::size_t cell, int degree);
ScaledBasis simplex_basis(const PolyMesh& mesh, std::size_t cell, std::size_t simplex, int degree);
FaceBasis face_basis(const PolyMesh& mesh, std::size_t face, int degree);
KoszulBasis koszul_basis(const PolyMesh& mesh, std::size_t cell, int k, const ScaledBasis& cell_basis);

/// L2-orthogonal projection onto span(basis) by a Gram solve over `rule`.
Eigen::VectorXd l2_project(const ScaledBasis& basis, const ScalarField& f, const QuadRule& rule);
/// Projection onto the span of the first n functions of `basis`.
Eigen::VectorXd l2_project_prefix(const ScaledBasis& basis, std::size_t n, const ScalarField& f, const QuadRule& rule);
Eigen::VectorXd l2_project(const FaceBasis& basis, const ScalarField& f, const QuadRule& rule);

}  // namespace polyhho
