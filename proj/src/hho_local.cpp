#include "polyhho/hho_local.hpp"

namespace polyhho {

DofLayout::DofLayout(const PolyMesh& mesh, int k_) : k(k_), num_cells(mesh.num_cells()), num_faces(mesh.num_faces()) {}

std::vector<std::size_t> DofLayout::local_to_global(const PolyMesh& mesh, std::size_t c) const {
    const Cell& T = mesh.cell(c);
    std::vector<std::size_t> idx;
    idx.reserve(local_size(T.faces.size()));
    for (std::size_t i = 0; i < cell_block(); ++i) idx.push_back(cell_offset(c) + i);
    for (auto f : T.faces)
        for (std::size_t i = 0; i < face_block(); ++i) idx.push_back(face_offset(f) + i);
    return idx;
}

Eigen::VectorXd DofLayout::gather(const PolyMesh& mesh, std::size_t c, const Eigen::VectorXd& global) const {
    const auto idx = local_to_global(mesh, c);
    Eigen::VectorXd out(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i) out[static_cast<Eigen::Index>(i)] = global[static_cast<Eigen::Index>(idx[i])];
    return out;
}

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

// Scalar dof layout [cell (dim P^k) | face 0 (k+1) | face 1 ...] -> vector layout.
struct ScalarToVector {
    std::size_t nk, nface, ns;
    std::size_t operator()(int comp, std::size_t s) const {
        if (s < nk) return static_cast<std::size_t>(comp) * nk + s;
        const std::size_t i = (s - nk) / nface, j = (s - nk) % nface;
        return 2 * nk + i * 2 * nface + static_cast<std::size_t>(comp) * nface + j;
    }
};

MatrixXd expand_diag(const MatrixXd& Ms, const ScalarToVector& map, std::size_t ndofs) {
    MatrixXd V = MatrixXd::Zero(static_cast<Index>(ndofs), static_cast<Index>(ndofs));
    for (int c = 0; c < 2; ++c)
        for (std::size_t a = 0; a < map.ns; ++a)
            for (std::size_t b = 0; b < map.ns; ++b)
                V(static_cast<Index>(map(c, a)), static_cast<Index>(map(c, b))) = Ms(static_cast<Index>(a), static_cast<Index>(b));
    return V;
}

// Scalar local gradient operator onto a P^l basis on region X (cell or simplex):
// |X| g_{c,m} = int_X d_c v_T phi_m + sum_{F in faces} int_F (v_F - v_T) phi_m n_c.
MatrixXd scalar_gradient(const PolyMesh& mesh, const LocalOperators& ops, const ScaledBasis& test, std::size_t ntest,
                         const QuadRule& region, const std::vector<std::size_t>& faces, std::size_t ns) {
    const std::size_t nk = ops.nk();
    const auto kk = static_cast<std::size_t>(ops.k + 1);
    MatrixXd g = MatrixXd::Zero(static_cast<Index>(2 * ntest), static_cast<Index>(ns));
    double measure = 0.;
    VectorXd val;
    Eigen::MatrixX2d grad;
    for (const auto& q : region) {
        measure += q.w;
        const VectorXd phi = test.values(q.x).head(static_cast<Index>(ntest));
        ops.basis.eval(q.x, val, grad);
        for (int c = 0; c < 2; ++c)
            g.block(static_cast<Index>(c * ntest), 0, static_cast<Index>(ntest), static_cast<Index>(nk)).noalias() +=
                q.w * phi * grad.col(c).head(static_cast<Index>(nk)).transpose();
    }
    const int deg = ops.k + test.degree();
    for (auto i : faces) {
        const Face& F = mesh.face(mesh.cell(ops.cell).faces[i]);
        const Point n = ops.normals[i];
        for (const auto& q : quad_segment(mesh.vertex(F.v0), mesh.vertex(F.v1), deg)) {
            const VectorXd phi = test.values(q.x).head(static_cast<Index>(ntest));
            const VectorXd vT = ops.basis.values(q.x).head(static_cast<Index>(nk));
            const VectorXd vF = ops.face_bases[i].values(q.x);
            for (int c = 0; c < 2; ++c) {
                auto blk = g.middleRows(static_cast<Index>(c * ntest), static_cast<Index>(ntest));
                blk.leftCols(static_cast<Index>(nk)).noalias() -= (q.w * n[c]) * phi * vT.transpose();
                blk.middleCols(static_cast<Index>(nk + i * kk), static_cast<Index>(kk)).noalias() += (q.w * n[c]) * phi * vF.transpose();
            }
        }
    }
    return g / measure;
}

}  // namespace

LocalOperators build_local_operators(const PolyMesh& mesh, std::size_t cell, int k) {
    if (k < 0) throw BasisError("polynomial degree must be >= 0");
    LocalOperators ops;
    const Cell& T = mesh.cell(cell);
    ops.cell = cell;
    ops.k = k;
    ops.num_faces = T.faces.size();
    ops.basis = cell_basis(mesh, cell, k + 1);
    for (std::size_t i = 0; i < ops.num_faces; ++i) {
        ops.face_bases.push_back(face_basis(mesh, T.faces[i], k));
        ops.normals.push_back(mesh.outward_normal(cell, i));
    }
    const std::size_t nk = dim_pk(k), nk1 = dim_pk(k + 1), kk = static_cast<std::size_t>(k + 1);
    const std::size_t ns = nk + ops.num_faces * kk, nd = ops.ndofs();
    const ScalarToVector map{nk, kk, ns};
    std::vector<std::size_t> all_faces(ops.num_faces);
    for (std::size_t i = 0; i < all_faces.size(); ++i) all_faces[i] = i;

    // gradient and divergence
    const MatrixXd g = scalar_gradient(mesh, ops, ops.basis, nk, quad_cell(mesh, cell, 2 * k), all_faces, ns);
    ops.Gcell = MatrixXd::Zero(static_cast<Index>(4 * nk), static_cast<Index>(nd));
    ops.D = MatrixXd::Zero(static_cast<Index>(nk), static_cast<Index>(nd));
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (std::size_t m = 0; m < nk; ++m)
                for (std::size_t s = 0; s < ns; ++s) {
                    const double v = g(static_cast<Index>(j * nk + m), static_cast<Index>(s));
                    ops.Gcell(static_cast<Index>((2 * i + j) * nk + m), static_cast<Index>(map(i, s))) = v;
                    if (i == j) ops.D(static_cast<Index>(m), static_cast<Index>(map(i, s))) += v;
                }

    // potential reconstruction p in P^{k+1}: (grad p, grad w) = (grad v_T, grad w) + sum_F (v_F - v_T, grad w . n)
    MatrixXd K = MatrixXd::Zero(static_cast<Index>(nk1), static_cast<Index>(nk1));
    MatrixXd rhs = MatrixXd::Zero(static_cast<Index>(nk1), static_cast<Index>(ns));
    VectorXd val;
    Eigen::MatrixX2d grad;
    for (const auto& q : quad_cell(mesh, cell, 2 * k)) {
        ops.basis.eval(q.x, val, grad);
        K.noalias() += q.w * grad * grad.transpose();
    }
    rhs.leftCols(static_cast<Index>(nk)) = K.leftCols(static_cast<Index>(nk));
    for (std::size_t i = 0; i < ops.num_faces; ++i) {
        const Face& F = mesh.face(T.faces[i]);
        for (const auto& q : quad_segment(mesh.vertex(F.v0), mesh.vertex(F.v1), 2 * k + 1)) {
            ops.basis.eval(q.x, val, grad);
            const VectorXd dn = grad * ops.normals[i];
            const VectorXd vF = ops.face_bases[i].values(q.x);
            rhs.leftCols(static_cast<Index>(nk)).noalias() -= q.w * dn * val.head(static_cast<Index>(nk)).transpose();
            rhs.middleCols(static_cast<Index>(nk + i * kk), static_cast<Index>(kk)).noalias() += q.w * dn * vF.transpose();
        }
    }
    MatrixXd Ps = MatrixXd::Zero(static_cast<Index>(nk1), static_cast<Index>(ns));
    const Index r = static_cast<Index>(nk1 - 1);
    Ps.bottomRows(r) = K.bottomRightCorner(r, r).llt().solve(rhs.bottomRows(r));
    Ps(0, 0) = 1.;
    ops.P = MatrixXd::Zero(static_cast<Index>(2 * nk1), static_cast<Index>(nd));
    for (int c = 0; c < 2; ++c)
        for (std::size_t m = 0; m < nk1; ++m)
            for (std::size_t s = 0; s < ns; ++s)
                ops.P(static_cast<Index>(c * nk1 + m), static_cast<Index>(map(c, s))) = Ps(static_cast<Index>(m), static_cast<Index>(s));

    // stabilization: delta_F = pi_F^k (v_F - p - (v_T - pi_T^k p)), s_T = sum_F h_F^{-1} ||delta_F||_F^2
    MatrixXd Ss = MatrixXd::Zero(static_cast<Index>(ns), static_cast<Index>(ns));
    MatrixXd Ds(static_cast<Index>(ops.num_faces * kk), static_cast<Index>(ns));
    MatrixXd N1s = MatrixXd::Zero(static_cast<Index>(ns), static_cast<Index>(ns));
    N1s.topLeftCorner(static_cast<Index>(nk), static_cast<Index>(nk)) = K.topLeftCorner(static_cast<Index>(nk), static_cast<Index>(nk));
    for (std::size_t i = 0; i < ops.num_faces; ++i) {
        const Face& F = mesh.face(T.faces[i]);
        MatrixXd delta = MatrixXd::Zero(static_cast<Index>(kk), static_cast<Index>(ns));
        delta.middleCols(static_cast<Index>(nk + i * kk), static_cast<Index>(kk)).setIdentity();
        MatrixXd jump_gram = MatrixXd::Zero(static_cast<Index>(ns), static_cast<Index>(ns));
        for (const auto& q : quad_segment(mesh.vertex(F.v0), mesh.vertex(F.v1), 2 * k + 2)) {
            const VectorXd phi = ops.basis.values(q.x);
            const VectorXd psi = ops.face_bases[i].values(q.x);
            // trace of v_T + (p - pi^k p) as a row over scalar dofs
            Eigen::RowVectorXd tr = phi.tail(static_cast<Index>(nk1 - nk)).transpose() * Ps.bottomRows(static_cast<Index>(nk1 - nk));
            tr.head(static_cast<Index>(nk)) += phi.head(static_cast<Index>(nk)).transpose();
            delta.noalias() -= (q.w / F.length) * psi * tr;
            Eigen::RowVectorXd jump = Eigen::RowVectorXd::Zero(static_cast<Index>(ns));
            jump.segment(static_cast<Index>(nk + i * kk), static_cast<Index>(kk)) = psi.transpose();
            jump.head(static_cast<Index>(nk)) -= phi.head(static_cast<Index>(nk)).transpose();
            jump_gram.noalias() += q.w * jump.transpose() * jump;
        }
        Ss.noalias() += delta.transpose() * delta;
        Ds.middleRows(static_cast<Index>(i * kk), static_cast<Index>(kk)) = delta;
        N1s += jump_gram / F.length;
    }
    ops.S = expand_diag(Ss, map, nd);
    ops.Sfactor = MatrixXd::Zero(2 * Ds.rows(), static_cast<Index>(nd));
    for (int c = 0; c < 2; ++c)
        for (std::size_t s = 0; s < ns; ++s)
            ops.Sfactor.col(static_cast<Index>(map(c, s))).segment(c * Ds.rows(), Ds.rows()) = Ds.col(static_cast<Index>(s));
    ops.N1 = expand_diag(N1s, map, nd);
    ops.A = T.area * ops.Gcell.transpose() * ops.Gcell + ops.S;
    ops.A = (0.5 * (ops.A + ops.A.transpose())).eval();
    return ops;
}

double LocalOperators::stabilization_value(const Eigen::VectorXd& dofs) const {
    return (Sfactor * dofs).squaredNorm();
}

Point LocalOperators::cell_value(const Eigen::VectorXd& dofs, const Point& x) const {
    return cell_value_map(x) * dofs;
}

Eigen::Matrix2Xd LocalOperators::cell_value_map(const Point& x) const {
    const auto n = static_cast<Index>(nk());
    Eigen::Matrix2Xd m = Eigen::Matrix2Xd::Zero(2, static_cast<Index>(ndofs()));
    const VectorXd phi = basis.values(x).head(n);
    m.block(0, 0, 1, n) = phi.transpose();
    m.block(1, n, 1, n) = phi.transpose();
    return m;
}

Eigen::Matrix4Xd LocalOperators::gcell_map(const Point& x) const {
    const auto n = static_cast<Index>(nk());
    const VectorXd phi = basis.values(x).head(n);
    Eigen::Matrix4Xd m(4, static_cast<Index>(ndofs()));
    for (Index r = 0; r < 4; ++r) m.row(r) = phi.transpose() * Gcell.middleRows(r * n, n);
    return m;
}

Eigen::Matrix2Xd LocalOperators::face_value_map(std::size_t local_face, const Point& x) const {
    Eigen::Matrix2Xd m = Eigen::Matrix2Xd::Zero(2, static_cast<Index>(ndofs()));
    const VectorXd psi = face_bases[local_face].values(x);
    const auto kk = static_cast<Index>(k + 1);
    m.block(0, static_cast<Index>(face_index(local_face, 0, 0)), 1, kk) = psi.transpose();
    m.block(1, static_cast<Index>(face_index(local_face, 1, 0)), 1, kk) = psi.transpose();
    return m;
}

Eigen::VectorXd interpolate_local(const PolyMesh& mesh, const LocalOperators& ops, const VectorField& v, int extra_degree) {
    VectorXd dofs(static_cast<Index>(ops.ndofs()));
    const std::size_t nk = ops.nk();
    const auto cell_rule = quad_cell(mesh, ops.cell, 2 * ops.k + extra_degree);
    for (int c = 0; c < 2; ++c)
        dofs.segment(static_cast<Index>(c * nk), static_cast<Index>(nk)) =
            l2_project_prefix(ops.basis, nk, [&](const Point& x) { return v(x)[c]; }, cell_rule);
    const Cell& T = mesh.cell(ops.cell);
    for (std::size_t i = 0; i < ops.num_faces; ++i) {
        const auto rule = quad_face(mesh, T.faces[i], 2 * ops.k + extra_degree);
        for (int c = 0; c < 2; ++c)
            dofs.segment(static_cast<Index>(ops.face_index(i, c, 0)), ops.k + 1) =
                l2_project(ops.face_bases[i], [&](const Point& x) { return v(x)[c]; }, rule);
    }
    return dofs;
}

Eigen::VectorXd interpolate(const PolyMesh& mesh, int k, const VectorField& v, int extra_degree) {
    const DofLayout layout(mesh, k);
    VectorXd out(static_cast<Index>(layout.size()));
    const std::size_t nk = dim_pk(k);
    for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
        const ScaledBasis basis = cell_basis(mesh, c, k + 1);
        const auto rule = quad_cell(mesh, c, 2 * k + extra_degree);
        for (int comp = 0; comp < 2; ++comp)
            out.segment(static_cast<Index>(layout.cell_offset(c) + comp * nk), static_cast<Index>(nk)) =
                l2_project_prefix(basis, nk, [&](const Point& x) { return v(x)[comp]; }, rule);
    }
    for (std::size_t f = 0; f < mesh.num_faces(); ++f) {
        const FaceBasis fb = face_basis(mesh, f, k);
        const auto rule = quad_face(mesh, f, 2 * k + extra_degree);
        for (int comp = 0; comp < 2; ++comp)
            out.segment(static_cast<Index>(layout.face_offset(f) + comp * (k + 1)), k + 1) =
                l2_project(fb, [&](const Point& x) { return v(x)[comp]; }, rule);
    }
    return out;
}

Eigen::Matrix4Xd SubmeshGradient::map(std::size_t t, const Point& x) const {
    const auto n = static_cast<Index>(dim_pk(l));
    const VectorXd phi = bases[t].values(x);
    Eigen::Matrix4Xd m(4, G[t].cols());
    for (Index r = 0; r < 4; ++r) m.row(r) = phi.transpose() * G[t].middleRows(r * n, n);
    return m;
}

SubmeshGradient gradient_submesh_op(const PolyMesh& mesh, const LocalOperators& ops, int l) {
    SubmeshGradient out;
    out.l = l;
    const auto& st = mesh.subtriangulation(ops.cell);
    const std::size_t nk = ops.nk(), kk = static_cast<std::size_t>(ops.k + 1), nl = dim_pk(l);
    const std::size_t ns = nk + ops.num_faces * kk, nd = ops.ndofs();
    const ScalarToVector map{nk, kk, ns};
    for (std::size_t t = 0; t < st.simplices.size(); ++t) {
        out.bases.push_back(simplex_basis(mesh, ops.cell, t, l));
        std::vector<std::size_t> faces;
        for (const auto& e : st.simplex_edges[t])
            if (e.boundary) faces.push_back(e.index);
        const MatrixXd g = scalar_gradient(mesh, ops, out.bases.back(), nl,
                                           quad_simplex(mesh, ops.cell, t, ops.k + l), faces, ns);
        MatrixXd G = MatrixXd::Zero(static_cast<Index>(4 * nl), static_cast<Index>(nd));
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                for (std::size_t m = 0; m < nl; ++m)
                    for (std::size_t s = 0; s < ns; ++s)
                        G(static_cast<Index>((2 * i + j) * nl + m), static_cast<Index>(map(i, s))) =
                            g(static_cast<Index>(j * nl + m), static_cast<Index>(s));
        out.G.push_back(std::move(G));
    }
    return out;
}

double seminorm_1T(const LocalOperators& ops, const Eigen::VectorXd& dofs) {
    return std::sqrt(std::max(0., dofs.dot(ops.N1 * dofs)));
}

double seminorm_1h(const PolyMesh& mesh, const std::vector<LocalOperators>& ops, const DofLayout& layout,
                   const Eigen::VectorXd& global) {
    double s = 0.;
    for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
        const VectorXd v = layout.gather(mesh, c, global);
        s += v.dot(ops[c].N1 * v);
    }
    return std::sqrt(std::max(0., s));
}

}  // namespace polyhho
