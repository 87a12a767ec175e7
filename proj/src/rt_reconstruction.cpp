#include "polyhho/rt_reconstruction.hpp"

#include <sstream>

namespace polyhho {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

RTSpace::RTSpace(const PolyMesh& mesh, std::size_t cell, int k) : k_(k), cell_(cell) {
    if (k < 0) throw RTError("RT degree must be >= 0");
    const Cell& T = mesh.cell(cell);
    const auto& st = mesh.subtriangulation(cell);
    const std::size_t kk = static_cast<std::size_t>(k + 1), nf = T.faces.size(), ni = st.interior_edges.size();
    const std::size_t nm1 = dim_pk(k - 1), nloc = local_size();
    nbd_ = nf * kk;
    size_ = (nf + ni) * kk + st.simplices.size() * 2 * nm1;
    for (std::size_t t = 0; t < st.simplices.size(); ++t) {
        const auto& S = st.simplices[t];
        SimplexData sd;
        sd.raw = ScaledBasis(k, S.centroid, S.diameter);
        sd.map.resize(nloc);
        MatrixXd V = MatrixXd::Zero(static_cast<Index>(nloc), static_cast<Index>(nloc));
        Eigen::Matrix2Xd span;
        for (std::size_t e = 0; e < 3; ++e) {
            const auto& se = st.simplex_edges[t][e];
            Point n, a, b;
            std::size_t first;
            if (se.boundary) {
                const Face& F = mesh.face(T.faces[se.index]);
                n = F.normal;
                a = mesh.vertex(F.v0);
                b = mesh.vertex(F.v1);
                first = se.index * kk;
            } else {
                const auto& ie = st.interior_edges[se.index];
                n = ie.normal;
                a = mesh.vertex(ie.v0);
                b = mesh.vertex(ie.v1);
                first = (nf + se.index) * kk;
            }
            const FaceBasis fb(k, a, b);
            const double len = (b - a).norm();
            for (const auto& q : quad_segment(a, b, 2 * k + 1)) {
                spanning(sd, q.x, &span, nullptr);
                const VectorXd psi = fb.values(q.x);
                V.middleRows(static_cast<Index>(e * kk), static_cast<Index>(kk)).noalias() +=
                    (q.w / len) * psi * (n.transpose() * span);
            }
            for (std::size_t j = 0; j < kk; ++j) sd.map[e * kk + j] = first + j;
        }
        if (k >= 1) {
            const ScaledBasis test = simplex_basis(mesh, cell, t, k - 1);
            for (const auto& q : quad_simplex(mesh, cell, t, 2 * k + 1)) {
                spanning(sd, q.x, &span, nullptr);
                const VectorXd psi = test.values(q.x);
                for (int c = 0; c < 2; ++c)
                    V.middleRows(static_cast<Index>(3 * kk + c * nm1), static_cast<Index>(nm1)).noalias() +=
                        (q.w / S.area) * psi * span.row(c);
            }
            for (std::size_t i = 0; i < 2 * nm1; ++i)
                sd.map[3 * kk + i] = nbd_ + ni * kk + t * 2 * nm1 + i;
        }
        Eigen::JacobiSVD<MatrixXd> svd(V);
        const auto& sv = svd.singularValues();
        sd.cond = sv[0] / sv[sv.size() - 1];
        if (!(sd.cond < 1e12)) {
            std::ostringstream msg;
            msg << "cell " << cell << ", simplex " << t << ": RT dofs not unisolvent (condition " << sd.cond << ")";
            throw RTError(msg.str());
        }
        sd.C = V.fullPivLu().inverse();
        simplices_.push_back(std::move(sd));
    }
}

void RTSpace::spanning(const SimplexData& s, const Point& x, Eigen::Matrix2Xd* val, Eigen::RowVectorXd* div) const {
    const std::size_t nk = dim_pk(k_), nk1 = dim_pk(k_ - 1), nloc = local_size();
    VectorXd m;
    Eigen::MatrixX2d dm;
    s.raw.eval(x, m, dm);
    const Point xi = (x - s.raw.center()) / s.raw.h();
    const auto n = static_cast<Index>(nk);
    if (val) {
        val->setZero(2, static_cast<Index>(nloc));
        val->block(0, 0, 1, n) = m.transpose();
        val->block(1, n, 1, n) = m.transpose();
        for (std::size_t a = 0; a <= static_cast<std::size_t>(k_); ++a)
            val->col(static_cast<Index>(2 * nk + a)) = xi * m[static_cast<Index>(nk1 + a)];
    }
    if (div) {
        div->resize(static_cast<Index>(nloc));
        div->head(n) = dm.col(0).transpose();
        div->segment(n, n) = dm.col(1).transpose();
        for (std::size_t a = 0; a <= static_cast<std::size_t>(k_); ++a)
            (*div)[static_cast<Index>(2 * nk + a)] = (2. + k_) * m[static_cast<Index>(nk1 + a)] / s.raw.h();
    }
}

Eigen::Matrix2Xd RTSpace::local_values(std::size_t t, const Point& x) const {
    Eigen::Matrix2Xd span;
    spanning(simplices_[t], x, &span, nullptr);
    return span * simplices_[t].C;
}

Eigen::RowVectorXd RTSpace::local_divergence(std::size_t t, const Point& x) const {
    Eigen::RowVectorXd div;
    spanning(simplices_[t], x, nullptr, &div);
    return div * simplices_[t].C;
}

Eigen::Matrix2Xd RTSpace::values(std::size_t t, const Point& x) const {
    const Eigen::Matrix2Xd loc = local_values(t, x);
    Eigen::Matrix2Xd out = Eigen::Matrix2Xd::Zero(2, static_cast<Index>(size_));
    const auto& map = simplices_[t].map;
    for (std::size_t d = 0; d < map.size(); ++d) out.col(static_cast<Index>(map[d])) = loc.col(static_cast<Index>(d));
    return out;
}

Eigen::RowVectorXd RTSpace::divergence(std::size_t t, const Point& x) const {
    const Eigen::RowVectorXd loc = local_divergence(t, x);
    Eigen::RowVectorXd out = Eigen::RowVectorXd::Zero(static_cast<Index>(size_));
    const auto& map = simplices_[t].map;
    for (std::size_t d = 0; d < map.size(); ++d) out[static_cast<Index>(map[d])] = loc[static_cast<Index>(d)];
    return out;
}

Point RTSpace::evaluate(const Eigen::VectorXd& coeffs, std::size_t t, const Point& x) const {
    const Eigen::Matrix2Xd loc = local_values(t, x);
    Point v = Point::Zero();
    const auto& map = simplices_[t].map;
    for (std::size_t d = 0; d < map.size(); ++d) v += coeffs[static_cast<Index>(map[d])] * loc.col(static_cast<Index>(d));
    return v;
}

double RTSpace::evaluate_divergence(const Eigen::VectorXd& coeffs, std::size_t t, const Point& x) const {
    const Eigen::RowVectorXd loc = local_divergence(t, x);
    double v = 0.;
    const auto& map = simplices_[t].map;
    for (std::size_t d = 0; d < map.size(); ++d) v += coeffs[static_cast<Index>(map[d])] * loc[static_cast<Index>(d)];
    return v;
}

Eigen::MatrixXd boundary_lifting(const PolyMesh& mesh, const RTSpace& rt, const LocalOperators& ops) {
    MatrixXd L = MatrixXd::Zero(static_cast<Index>(rt.size()), static_cast<Index>(ops.ndofs()));
    const std::size_t kk = static_cast<std::size_t>(ops.k + 1);
    for (std::size_t i = 0; i < ops.num_faces; ++i) {
        const Point n = mesh.face(mesh.cell(ops.cell).faces[i]).normal;
        for (std::size_t j = 0; j < kk; ++j) {
            const auto r = static_cast<Index>(i * kk + j);
            L(r, static_cast<Index>(ops.face_index(i, 0, j))) = n.x();
            L(r, static_cast<Index>(ops.face_index(i, 1, j))) = n.y();
        }
    }
    return L;
}

namespace {

[[noreturn]] void fail(std::size_t cell, const std::string& what) {
    throw RTError("cell " + std::to_string(cell) + ": " + what);
}

}  // namespace

Eigen::MatrixXd reconstruction_map(const PolyMesh& mesh, const LocalOperators& ops, const RTSpace& rt) {
    const int k = ops.k;
    const std::size_t cell = ops.cell;
    const auto& st = mesh.subtriangulation(cell);
    const Index nrt = static_cast<Index>(rt.size()), nb = static_cast<Index>(rt.num_boundary_dofs());
    const Index n0 = nrt - nb, nd = static_cast<Index>(ops.ndofs());
    const Index nk = static_cast<Index>(dim_pk(k)), nsim = static_cast<Index>(st.simplices.size());
    const Index nphi = nsim * nk;
    const KoszulBasis kz = koszul_basis(mesh, cell, k - 1, ops.basis);
    const Index ng = static_cast<Index>(kz.size());

    const MatrixXd L = boundary_lifting(mesh, rt, ops);

    MatrixXd Mfull = MatrixXd::Zero(n0, nrt);
    MatrixXd Bfull = MatrixXd::Zero(nphi, nrt);
    MatrixXd Cfull = MatrixXd::Zero(ng, nrt);
    MatrixXd Q1 = MatrixXd::Zero(n0, nd);
    MatrixXd Dproj = MatrixXd::Zero(nphi, nd);
    MatrixXd C3 = MatrixXd::Zero(ng, nd);
    VectorXd mean = VectorXd::Zero(nphi);
    const MatrixXd Dcell = ops.D;
    for (Index t = 0; t < nsim; ++t) {
        const ScaledBasis sb = simplex_basis(mesh, cell, static_cast<std::size_t>(t), k);
        for (const auto& q : quad_simplex(mesh, cell, static_cast<std::size_t>(t), 2 * k + 2)) {
            const Eigen::Matrix2Xd W = rt.values(static_cast<std::size_t>(t), q.x);
            const Eigen::RowVectorXd dW = rt.divergence(static_cast<std::size_t>(t), q.x);
            const Eigen::Matrix2Xd Vt = ops.cell_value_map(q.x);
            const VectorXd phi = sb.values(q.x);
            const VectorXd phiT = ops.basis.values(q.x).head(nk);
            Mfull.noalias() += q.w * W.rightCols(n0).transpose() * W;
            Q1.noalias() += q.w * W.rightCols(n0).transpose() * Vt;
            Bfull.middleRows(t * nk, nk).noalias() += q.w * phi * dW;
            Dproj.middleRows(t * nk, nk).noalias() += q.w * phi * (phiT.transpose() * Dcell);
            mean.segment(t * nk, nk) += q.w * phi;
            if (ng > 0) {
                const Eigen::Matrix2Xd xi = kz.values(q.x);
                Cfull.noalias() += q.w * xi.transpose() * W;
                C3.noalias() += q.w * xi.transpose() * Vt;
            }
        }
    }

    MatrixXd R = L;
    Eigen::HouseholderQR<MatrixXd> qr(mean);
    const MatrixXd Q = qr.householderQ() * MatrixXd::Identity(nphi, nphi);
    const MatrixXd Z = Q.rightCols(nphi - 1);
    const Index np = nphi - 1, nsys = n0 + np + ng;
    if (nsys > 0) {
        MatrixXd K = MatrixXd::Zero(nsys, nsys);
        const MatrixXd B = Z.transpose() * Bfull.rightCols(n0);
        K.topLeftCorner(n0, n0) = Mfull.rightCols(n0);
        K.block(0, n0, n0, np) = B.transpose();
        K.block(n0, 0, np, n0) = B;
        if (ng > 0) {
            K.block(0, n0 + np, n0, ng) = Cfull.rightCols(n0).transpose();
            K.block(n0 + np, 0, ng, n0) = Cfull.rightCols(n0);
        }
        MatrixXd rhs(nsys, nd);
        rhs.topRows(n0) = Q1 - Mfull * L;
        rhs.middleRows(n0, np) = Z.transpose() * (Dproj - Bfull * L);
        if (ng > 0) rhs.bottomRows(ng) = C3 - Cfull * L;
        Eigen::FullPivLU<MatrixXd> lu(K);
        if (lu.rank() < nsys) {
            std::ostringstream msg;
            msg << "singular local mixed system (rank " << lu.rank() << " of " << nsys << ", rcond " << lu.rcond() << ")";
            fail(cell, msg.str());
        }
        const MatrixXd X = lu.solve(rhs);
        const double scale = K.norm() * X.norm() + rhs.norm();
        if ((K * X - rhs).norm() > 1e-10 * scale) fail(cell, "local mixed solve failed the residual check");
        R.bottomRows(n0) += X.topRows(n0);
    }
    // full divergence constraint, including the mean
    const double dscale = Dproj.norm() + 1.;
    if ((Bfull * R - Dproj).norm() > 1e-10 * dscale) fail(cell, "reconstruction violates the divergence constraint");
    return R;
}

Eigen::VectorXd solve_local_mixed(const PolyMesh& mesh, const LocalOperators& ops, const RTSpace& rt,
                                  const Eigen::VectorXd& dofs) {
    return reconstruction_map(mesh, ops, rt) * dofs;
}

RTField::RTField(const PolyMesh& mesh, const std::vector<RTSpace>& spaces, std::vector<Eigen::VectorXd> coeffs)
    : mesh_(&mesh), spaces_(&spaces), coeffs_(std::move(coeffs)) {}

Point RTField::value(std::size_t cell, std::size_t simplex, const Point& x) const {
    return (*spaces_)[cell].evaluate(coeffs_[cell], simplex, x);
}

double RTField::divergence(std::size_t cell, std::size_t simplex, const Point& x) const {
    return (*spaces_)[cell].evaluate_divergence(coeffs_[cell], simplex, x);
}

Point RTField::value(const Point& x) const {
    const std::size_t c = mesh_->locate(x);
    if (c == kNoCell) throw RTError("point outside the mesh");
    const auto& st = mesh_->subtriangulation(c);
    std::size_t best = 0;
    double best_min = -1e300;
    for (std::size_t t = 0; t < st.simplices.size(); ++t) {
        const auto& v = st.simplices[t].vertices;
        const Point a = mesh_->vertex(v[0]), b = mesh_->vertex(v[1]), d = mesh_->vertex(v[2]);
        const double det = (b - a).x() * (d - a).y() - (b - a).y() * (d - a).x();
        const Point r = x - a;
        const double l1 = (r.x() * (d - a).y() - r.y() * (d - a).x()) / det;
        const double l2 = ((b - a).x() * r.y() - (b - a).y() * r.x()) / det;
        const double m = std::min({1. - l1 - l2, l1, l2});
        if (m > best_min) {
            best_min = m;
            best = t;
        }
    }
    return value(c, best, x);
}

RTField global_reconstruction(const PolyMesh& mesh, const std::vector<LocalOperators>& ops,
                              const std::vector<RTSpace>& spaces, const DofLayout& layout, const Eigen::VectorXd& global) {
    std::vector<VectorXd> coeffs(mesh.num_cells());
    for (std::size_t c = 0; c < mesh.num_cells(); ++c) coeffs[c] = ops[c].R * layout.gather(mesh, c, global);
    return RTField(mesh, spaces, std::move(coeffs));
}

}  // namespace polyhho
