#include "polyhho/forms.hpp"

namespace polyhho {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

Mode parse_mode(const std::string& name) {
    if (name == "robust") return Mode::robust;
    if (name == "classic") return Mode::classic;
    throw std::invalid_argument("unknown mode '" + name + "' (expected robust or classic)");
}

std::string mode_name(Mode m) { return m == Mode::robust ? "robust" : "classic"; }

namespace {

CellQuadData build_quad_data(const PolyMesh& mesh, const LocalOperators& ops, const RTSpace& rt) {
    CellQuadData d;
    const int deg = 3 * ops.k + 2;
    const auto nk = static_cast<Index>(ops.nk());
    const auto nd = static_cast<Index>(ops.ndofs());
    const auto& st = mesh.subtriangulation(ops.cell);
    VectorXd val;
    Eigen::MatrixX2d grad;
    for (std::size_t t = 0; t < st.simplices.size(); ++t)
        for (const auto& q : quad_simplex(mesh, ops.cell, t, deg)) {
            d.w.push_back(q.w);
            d.R.push_back(rt.values(t, q.x) * ops.R);
            d.V.push_back(ops.cell_value_map(q.x));
            ops.basis.eval(q.x, val, grad);
            Eigen::Matrix4Xd G = Eigen::Matrix4Xd::Zero(4, nd);
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) G.block(2 * i + j, i * nk, 1, nk) = grad.col(j).head(nk).transpose();
            d.G.push_back(std::move(G));
        }
    const Cell& T = mesh.cell(ops.cell);
    for (std::size_t i = 0; i < ops.num_faces; ++i) {
        const std::size_t t = st.face_simplex[i];
        for (const auto& q : quad_face(mesh, T.faces[i], deg)) {
            d.fw.push_back(q.w);
            d.fn.push_back(ops.normals[i]);
            d.fR.push_back(rt.values(t, q.x) * ops.R);
            d.fV.push_back(ops.cell_value_map(q.x));
            d.fD.push_back(ops.face_value_map(i, q.x) - d.fV.back());
        }
    }
    return d;
}

template <class Local>
SparseMatrix scatter(const Discretization& disc, std::size_t rows, std::size_t cols, Local&& local) {
    std::vector<Eigen::Triplet<double>> trip;
    for (std::size_t c = 0; c < disc.mesh().num_cells(); ++c) local(c, trip);
    SparseMatrix M(static_cast<Index>(rows), static_cast<Index>(cols));
    M.setFromTriplets(trip.begin(), trip.end());
    return M;
}

}  // namespace

Discretization::Discretization(PolyMesh mesh, int k) : mesh_(std::move(mesh)), k_(k), layout_(mesh_, k) {
    if (k < 0) throw std::invalid_argument("polynomial degree must be >= 0");
    const std::size_t nc = mesh_.num_cells();
    ops_.reserve(nc);
    rt_.reserve(nc);
    quad_.reserve(nc);
    for (std::size_t c = 0; c < nc; ++c) {
        ops_.push_back(build_local_operators(mesh_, c, k));
        rt_.emplace_back(mesh_, c, k);
        ops_.back().R = reconstruction_map(mesh_, ops_.back(), rt_.back());
        quad_.push_back(build_quad_data(mesh_, ops_.back(), rt_.back()));
    }
}

RTField Discretization::reconstruct(const Eigen::VectorXd& u) const {
    return global_reconstruction(mesh_, ops_, rt_, layout_, u);
}

SparseMatrix assemble_viscous(const Discretization& disc) {
    const auto n = disc.num_velocity_dofs();
    return scatter(disc, n, n, [&](std::size_t c, std::vector<Eigen::Triplet<double>>& trip) {
        const auto idx = disc.layout().local_to_global(disc.mesh(), c);
        const MatrixXd& A = disc.ops(c).A;
        for (std::size_t i = 0; i < idx.size(); ++i)
            for (std::size_t j = 0; j < idx.size(); ++j)
                trip.emplace_back(static_cast<Index>(idx[i]), static_cast<Index>(idx[j]), A(static_cast<Index>(i), static_cast<Index>(j)));
    });
}

Eigen::MatrixXd local_coupling(const Discretization& disc, std::size_t c) {
    return -disc.mesh().cell(c).area * disc.ops(c).D;
}

SparseMatrix assemble_coupling(const Discretization& disc) {
    return scatter(disc, disc.num_pressure_dofs(), disc.num_velocity_dofs(),
                   [&](std::size_t c, std::vector<Eigen::Triplet<double>>& trip) {
                       const auto idx = disc.layout().local_to_global(disc.mesh(), c);
                       const MatrixXd B = local_coupling(disc, c);
                       const std::size_t off = disc.pressure_offset(c);
                       for (Index i = 0; i < B.rows(); ++i)
                           for (std::size_t j = 0; j < idx.size(); ++j)
                               trip.emplace_back(static_cast<Index>(off) + i, static_cast<Index>(idx[j]), B(i, static_cast<Index>(j)));
                   });
}

Eigen::VectorXd local_body_force(const Discretization& disc, std::size_t c, const VectorField& f, Mode mode, int degree) {
    const LocalOperators& ops = disc.ops(c);
    if (degree < 0) degree = 2 * disc.k() + 8;
    VectorXd out = VectorXd::Zero(static_cast<Index>(ops.ndofs()));
    const auto& st = disc.mesh().subtriangulation(c);
    for (std::size_t t = 0; t < st.simplices.size(); ++t)
        for (const auto& q : quad_simplex(disc.mesh(), c, t, degree)) {
            const Point fx = f(q.x);
            if (mode == Mode::robust)
                out.noalias() += q.w * (ops.R.transpose() * (disc.rt(c).values(t, q.x).transpose() * fx));
            else
                out.noalias() += q.w * (ops.cell_value_map(q.x).transpose() * fx);
        }
    return out;
}

Eigen::VectorXd assemble_body_force(const Discretization& disc, const VectorField& f, Mode mode, int degree) {
    VectorXd out = VectorXd::Zero(static_cast<Index>(disc.num_velocity_dofs()));
    for (std::size_t c = 0; c < disc.mesh().num_cells(); ++c) {
        const auto idx = disc.layout().local_to_global(disc.mesh(), c);
        const VectorXd l = local_body_force(disc, c, f, mode, degree);
        for (std::size_t i = 0; i < idx.size(); ++i) out[static_cast<Index>(idx[i])] += l[static_cast<Index>(i)];
    }
    return out;
}

namespace {

inline Eigen::Matrix2d as_tensor(const Eigen::Vector4d& g) {
    Eigen::Matrix2d m;
    m << g[0], g[1], g[2], g[3];
    return m;
}

}  // namespace

double trilinear_apply(const Discretization& disc, const Eigen::VectorXd& w, const Eigen::VectorXd& v,
                       const Eigen::VectorXd& z, Mode mode) {
    double total = 0.;
    for (std::size_t c = 0; c < disc.mesh().num_cells(); ++c) {
        const CellQuadData& d = disc.quad(c);
        const VectorXd wl = disc.layout().gather(disc.mesh(), c, w);
        const VectorXd vl = disc.layout().gather(disc.mesh(), c, v);
        const VectorXd zl = disc.layout().gather(disc.mesh(), c, z);
        if (mode == Mode::robust) {
            for (std::size_t q = 0; q < d.w.size(); ++q) {
                const Eigen::Matrix2d gw = as_tensor(d.G[q] * wl);
                const Point rv = d.R[q] * vl, rz = d.R[q] * zl;
                total += d.w[q] * ((gw * rv).dot(rz) - (gw * rz).dot(rv));
            }
            for (std::size_t q = 0; q < d.fw.size(); ++q) {
                const Point dw = d.fD[q] * wl, rv = d.fR[q] * vl, rz = d.fR[q] * zl;
                const Point& n = d.fn[q];
                total += d.fw[q] * (dw.dot(rz) * rv.dot(n) - dw.dot(rv) * rz.dot(n));
            }
        } else {
            for (std::size_t q = 0; q < d.w.size(); ++q) {
                const Point tw = d.V[q] * wl, tv = d.V[q] * vl, tz = d.V[q] * zl;
                const Eigen::Matrix2d gv = as_tensor(d.G[q] * vl), gz = as_tensor(d.G[q] * zl);
                total += 0.5 * d.w[q] * ((gv * tw).dot(tz) - (gz * tw).dot(tv));
            }
            for (std::size_t q = 0; q < d.fw.size(); ++q) {
                const double wn = (d.fV[q] * wl).dot(d.fn[q]);
                const Point dv = d.fD[q] * vl, dz = d.fD[q] * zl, tv = d.fV[q] * vl, tz = d.fV[q] * zl;
                total += 0.5 * d.fw[q] * wn * (dv.dot(tz) - dz.dot(tv));
            }
        }
    }
    return total;
}

namespace {

// Rotational form with the reconstruction: sum_q ((grad w_T - grad w_T^T) R v).R z plus face terms.
void robust_convection(const CellQuadData& d, const Eigen::VectorXd& u, Eigen::VectorXd* residual,
                       Eigen::MatrixXd* jacobian) {
    const auto nd = u.size();
    Eigen::Matrix2Xd M1(2, nd);
    for (std::size_t q = 0; q < d.w.size(); ++q) {
        const Eigen::Matrix4Xd& G = d.G[q];
        const Eigen::Matrix2Xd& R = d.R[q];
        const Eigen::Matrix2d gu = as_tensor(G * u);
        const Eigen::Matrix2d skew = gu - gu.transpose();
        const Point ru = R * u;
        if (residual) residual->noalias() += d.w[q] * (R.transpose() * (skew * ru));
        if (jacobian) {
            for (int i = 0; i < 2; ++i)
                M1.row(i) = ru[0] * (G.row(2 * i) - G.row(i)) + ru[1] * (G.row(2 * i + 1) - G.row(2 + i));
            M1.noalias() += skew * R;
            jacobian->noalias() += d.w[q] * (R.transpose() * M1);
        }
    }
    for (std::size_t q = 0; q < d.fw.size(); ++q) {
        const Eigen::Matrix2Xd& R = d.fR[q];
        const Eigen::Matrix2Xd& D = d.fD[q];
        const Point& n = d.fn[q];
        const Point dv = D * u, ru = R * u;
        const double rn = ru.dot(n), dr = dv.dot(ru);
        if (residual) residual->noalias() += d.fw[q] * (R.transpose() * (dv * rn - n * dr));
        if (jacobian) {
            M1 = rn * D + dv * (n.transpose() * R) - n * (ru.transpose() * D + dv.transpose() * R);
            jacobian->noalias() += d.fw[q] * (R.transpose() * M1);
        }
    }
}

// Skew-symmetric convective form with cell polynomials:
// 1/2 [ (grad v_T w_T).z_T - (grad z_T w_T).v_T ] plus the face jump terms of the gradient reconstruction.
void classic_convection(const CellQuadData& d, const Eigen::VectorXd& u, Eigen::VectorXd* residual,
                        Eigen::MatrixXd* jacobian) {
    const auto nd = u.size();
    Eigen::Matrix2Xd M(2, nd);
    Eigen::Matrix4Xd W(4, nd);
    for (std::size_t q = 0; q < d.w.size(); ++q) {
        const Eigen::Matrix4Xd& G = d.G[q];
        const Eigen::Matrix2Xd& V = d.V[q];
        const Eigen::Matrix2d gu = as_tensor(G * u);
        const Point tu = V * u;
        const Eigen::Vector4d outer(tu[0] * tu[0], tu[0] * tu[1], tu[1] * tu[0], tu[1] * tu[1]);
        const double hw = 0.5 * d.w[q];
        if (residual) residual->noalias() += hw * (V.transpose() * (gu * tu) - G.transpose() * outer);
        if (jacobian) {
            for (int i = 0; i < 2; ++i) {
                M.row(i) = tu[0] * G.row(2 * i) + tu[1] * G.row(2 * i + 1);
                for (int j = 0; j < 2; ++j) W.row(2 * i + j) = tu[j] * V.row(i) + tu[i] * V.row(j);
            }
            M.noalias() += gu * V;
            jacobian->noalias() += hw * (V.transpose() * M - G.transpose() * W);
        }
    }
    for (std::size_t q = 0; q < d.fw.size(); ++q) {
        const Eigen::Matrix2Xd& V = d.fV[q];
        const Eigen::Matrix2Xd& D = d.fD[q];
        const Point& n = d.fn[q];
        const Point tu = V * u, du = D * u;
        const double un = tu.dot(n);
        const double hw = 0.5 * d.fw[q];
        if (residual) residual->noalias() += hw * un * (V.transpose() * du - D.transpose() * tu);
        if (jacobian) {
            const Eigen::RowVectorXd nV = n.transpose() * V;
            jacobian->noalias() += hw * (V.transpose() * (un * D + du * nV) - D.transpose() * (tu * nV + un * V));
        }
    }
}

}  // namespace

void local_convection(const Discretization& disc, std::size_t c, const Eigen::VectorXd& u, Mode mode,
                      Eigen::VectorXd* residual, Eigen::MatrixXd* jacobian) {
    const CellQuadData& d = disc.quad(c);
    const auto nd = u.size();
    if (residual) residual->setZero(nd);
    if (jacobian) jacobian->setZero(nd, nd);
    if (mode == Mode::robust)
        robust_convection(d, u, residual, jacobian);
    else
        classic_convection(d, u, residual, jacobian);
}

Eigen::VectorXd convection_residual(const Discretization& disc, const Eigen::VectorXd& u, Mode mode) {
    VectorXd out = VectorXd::Zero(u.size());
    VectorXd r;
    for (std::size_t c = 0; c < disc.mesh().num_cells(); ++c) {
        const auto idx = disc.layout().local_to_global(disc.mesh(), c);
        local_convection(disc, c, disc.layout().gather(disc.mesh(), c, u), mode, &r, nullptr);
        for (std::size_t i = 0; i < idx.size(); ++i) out[static_cast<Index>(idx[i])] += r[static_cast<Index>(i)];
    }
    return out;
}

SparseMatrix trilinear_jacobian(const Discretization& disc, const Eigen::VectorXd& u, Mode mode) {
    const auto n = disc.num_velocity_dofs();
    return scatter(disc, n, n, [&](std::size_t c, std::vector<Eigen::Triplet<double>>& trip) {
        const auto idx = disc.layout().local_to_global(disc.mesh(), c);
        MatrixXd J;
        local_convection(disc, c, disc.layout().gather(disc.mesh(), c, u), mode, nullptr, &J);
        for (std::size_t i = 0; i < idx.size(); ++i)
            for (std::size_t j = 0; j < idx.size(); ++j)
                trip.emplace_back(static_cast<Index>(idx[i]), static_cast<Index>(idx[j]), J(static_cast<Index>(i), static_cast<Index>(j)));
    });
}

double pressure_integral(const Discretization& disc, const Eigen::VectorXd& p) {
    double s = 0.;
    for (std::size_t c = 0; c < disc.mesh().num_cells(); ++c)
        s += disc.mesh().cell(c).area * p[static_cast<Index>(disc.pressure_offset(c))];
    return s;
}

namespace {

VectorXd zero_mean(const Discretization& disc, VectorXd p) {
    const double mean = pressure_integral(disc, p) / disc.mesh().total_area();
    for (std::size_t c = 0; c < disc.mesh().num_cells(); ++c) p[static_cast<Index>(disc.pressure_offset(c))] -= mean;
    return p;
}

}  // namespace

Eigen::VectorXd project_pressure(const Discretization& disc, const ScalarField& p, int extra_degree) {
    const std::size_t nk = dim_pk(disc.k());
    VectorXd out(static_cast<Index>(disc.num_pressure_dofs()));
    for (std::size_t c = 0; c < disc.mesh().num_cells(); ++c)
        out.segment(static_cast<Index>(disc.pressure_offset(c)), static_cast<Index>(nk)) =
            l2_project_prefix(disc.ops(c).basis, nk, p, quad_cell(disc.mesh(), c, 2 * disc.k() + extra_degree));
    return zero_mean(disc, out);
}

ErrorNorms error_norms(const Discretization& disc, const Eigen::VectorXd& u_h, const Eigen::VectorXd& p_h,
                       const VectorField& u, const ScalarField& p, double nu) {
    ErrorNorms out;
    const VectorXd e = u_h - interpolate(disc.mesh(), disc.k(), u);
    const VectorXd eps = zero_mean(disc, p_h) - project_pressure(disc, p);
    const std::size_t nk = dim_pk(disc.k());
    double en = 0., ev = 0., ep = 0.;
    for (std::size_t c = 0; c < disc.mesh().num_cells(); ++c) {
        const VectorXd el = disc.layout().gather(disc.mesh(), c, e);
        const double area = disc.mesh().cell(c).area;
        en += el.dot(disc.ops(c).A * el);
        ev += area * el.head(static_cast<Index>(2 * nk)).squaredNorm();
        ep += area * eps.segment(static_cast<Index>(disc.pressure_offset(c)), static_cast<Index>(nk)).squaredNorm();
    }
    out.energy = std::sqrt(std::max(0., nu * en));
    out.l2_velocity = std::sqrt(ev);
    out.l2_pressure = std::sqrt(ep);
    return out;
}

}  // namespace polyhho
