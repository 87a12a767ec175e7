#include "polyhho/basis.hpp"

#include <cmath>

namespace polyhho {

namespace {

template <class Basis>
Eigen::VectorXd project_impl(const Basis& basis, const ScalarField& f, const QuadRule& rule) {
    const auto n = static_cast<Eigen::Index>(basis.size());
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
    for (const auto& q : rule) {
        const Eigen::VectorXd phi = basis.values(q.x);
        G.noalias() += q.w * phi * phi.transpose();
        b += (q.w * f(q.x)) * phi;
    }
    Eigen::LLT<Eigen::MatrixXd> llt(G);
    if (llt.info() != Eigen::Success) throw BasisError("l2_project: singular Gram matrix");
    return llt.solve(b);
}

}  // namespace

ScaledBasis::ScaledBasis(int degree, const Point& center, double h)
    : degree_(degree), center_(center), h_(h) {
    if (degree < 0) throw BasisError("basis degree must be >= 0");
    if (!(h > 0.)) throw BasisError("basis scale must be positive");
    coef_ = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(size()), static_cast<Eigen::Index>(size()));
}

ScaledBasis::ScaledBasis(int degree, const Point& center, double h, const QuadRule& rule)
    : ScaledBasis(degree, center, h) {
    measure_ = 0.;
    for (const auto& q : rule) measure_ += q.w;
    if (!(measure_ > 0.)) throw BasisError("basis support has zero measure");
    const auto n = static_cast<Eigen::Index>(size());
    Eigen::VectorXd m;
    for (int pass = 0; pass < 2; ++pass) {
        Eigen::MatrixXd G = Eigen::MatrixXd::Zero(n, n);
        for (const auto& q : rule) {
            const Eigen::VectorXd v = values(q.x);
            G.noalias() += (q.w / measure_) * v * v.transpose();
        }
        Eigen::LLT<Eigen::MatrixXd> llt(G);
        if (llt.info() != Eigen::Success) throw BasisError("singular Gram matrix in basis orthonormalization");
        Eigen::MatrixXd Linv = Eigen::MatrixXd::Identity(n, n);
        llt.matrixL().solveInPlace(Linv);
        coef_ = (Linv * coef_).eval();
    }
}

void ScaledBasis::monomials(const Point& x, Eigen::VectorXd& m, Eigen::MatrixX2d* dm) const {
    const double xi = (x.x() - center_.x()) / h_, eta = (x.y() - center_.y()) / h_;
    const int l = degree_;
    double px[16], py[16];
    if (l >= 15) throw BasisError("basis degree too high");
    px[0] = py[0] = 1.;
    for (int i = 1; i <= l; ++i) {
        px[i] = px[i - 1] * xi;
        py[i] = py[i - 1] * eta;
    }
    m.resize(static_cast<Eigen::Index>(size()));
    if (dm) dm->resize(m.size(), 2);
    Eigen::Index idx = 0;
    for (int d = 0; d <= l; ++d)
        for (int b = 0; b <= d; ++b, ++idx) {
            const int a = d - b;
            m[idx] = px[a] * py[b];
            if (dm) {
                (*dm)(idx, 0) = a > 0 ? a * px[a - 1] * py[b] / h_ : 0.;
                (*dm)(idx, 1) = b > 0 ? b * px[a] * py[b - 1] / h_ : 0.;
            }
        }
}

Eigen::VectorXd ScaledBasis::values(const Point& x) const {
    Eigen::VectorXd m;
    monomials(x, m, nullptr);
    return coef_ * m;
}

Eigen::MatrixX2d ScaledBasis::gradients(const Point& x) const {
    Eigen::VectorXd m;
    Eigen::MatrixX2d dm;
    monomials(x, m, &dm);
    return coef_ * dm;
}

void ScaledBasis::eval(const Point& x, Eigen::VectorXd& val, Eigen::MatrixX2d& grad) const {
    Eigen::VectorXd m;
    Eigen::MatrixX2d dm;
    monomials(x, m, &dm);
    val.noalias() = coef_ * m;
    grad.noalias() = coef_ * dm;
}

FaceBasis::FaceBasis(int degree, const Point& a, const Point& b)
    : degree_(degree), mid_(0.5 * (a + b)), length_((b - a).norm()) {
    if (degree < 0) throw BasisError("basis degree must be >= 0");
    if (!(length_ > 0.)) throw BasisError("degenerate face");
    tangent_ = (b - a) / length_;
}

Eigen::VectorXd FaceBasis::values(const Point& x) const {
    const double s = 2. * (x - mid_).dot(tangent_) / length_;
    Eigen::VectorXd v(degree_ + 1);
    double p0 = 1., p1 = s;
    v[0] = 1.;
    if (degree_ >= 1) v[1] = std::sqrt(3.) * s;
    for (int j = 2; j <= degree_; ++j) {
        const double p2 = ((2. * j - 1.) * s * p1 - (j - 1.) * p0) / j;
        p0 = p1;
        p1 = p2;
        v[j] = std::sqrt(2. * j + 1.) * p2;
    }
    return v;
}

KoszulBasis::KoszulBasis(int k, const Point& apex, const ScaledBasis& cell_basis)
    : k_(k < 0 ? 0 : k), apex_(apex), basis_(cell_basis) {
    if (k_ >= 1 && cell_basis.degree() < k_ - 1) throw BasisError("koszul basis needs a cell basis of degree k-1");
}

Eigen::Matrix2Xd KoszulBasis::values(const Point& x) const {
    const auto n = static_cast<Eigen::Index>(size());
    Eigen::Matrix2Xd out(2, n);
    if (n == 0) return out;
    const Eigen::VectorXd psi = basis_.values(x).head(n);
    const Point xi = (x - apex_) / basis_.h();
    out.row(0) = -xi.y() * psi.transpose();
    out.row(1) = xi.x() * psi.transpose();
    return out;
}

ScaledBasis cell_basis(const PolyMesh& mesh, std::size_t cell, int degree) {
    const Cell& T = mesh.cell(cell);
    return ScaledBasis(degree, T.centroid, T.diameter, quad_cell(mesh, cell, 2 * degree));
}

ScaledBasis simplex_basis(const PolyMesh& mesh, std::size_t cell, std::size_t simplex, int degree) {
    const auto& s = mesh.subtriangulation(cell).simplices[simplex];
    return ScaledBasis(degree, s.centroid, s.diameter, quad_simplex(mesh, cell, simplex, 2 * degree));
}

FaceBasis face_basis(const PolyMesh& mesh, std::size_t face, int degree) {
    const Face& F = mesh.face(face);
    return FaceBasis(degree, mesh.vertex(F.v0), mesh.vertex(F.v1));
}

KoszulBasis koszul_basis(const PolyMesh& mesh, std::size_t cell, int k, const ScaledBasis& basis) {
    return KoszulBasis(k, mesh.vertex(mesh.subtriangulation(cell).apex), basis);
}

Eigen::VectorXd l2_project(const ScaledBasis& basis, const ScalarField& f, const QuadRule& rule) {
    return project_impl(basis, f, rule);
}

Eigen::VectorXd l2_project_prefix(const ScaledBasis& basis, std::size_t n, const ScalarField& f, const QuadRule& rule) {
    const auto m = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(m, m);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(m);
    for (const auto& q : rule) {
        const Eigen::VectorXd phi = basis.values(q.x).head(m);
        G.noalias() += q.w * phi * phi.transpose();
        b += (q.w * f(q.x)) * phi;
    }
    Eigen::LLT<Eigen::MatrixXd> llt(G);
    if (llt.info() != Eigen::Success) throw BasisError("l2_project: singular Gram matrix");
    return llt.solve(b);
}

Eigen::VectorXd l2_project(const FaceBasis& basis, const ScalarField& f, const QuadRule& rule) {
    return project_impl(basis, f, rule);
}

}  // namespace polyhho
