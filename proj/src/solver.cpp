#include "polyhho/solver.hpp"

#include <cmath>
#include <iostream>
#include <limits>

namespace polyhho {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using Triplet = Eigen::Triplet<double>;

namespace {
constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();
}

std::vector<bool> dirichlet_mask(const Discretization& disc) {
    const DofLayout& L = disc.layout();
    std::vector<bool> mask(L.size(), false);
    for (std::size_t f = 0; f < disc.mesh().num_faces(); ++f)
        if (disc.mesh().face(f).is_boundary())
            for (std::size_t i = 0; i < L.face_block(); ++i) mask[L.face_offset(f) + i] = true;
    return mask;
}

Eigen::VectorXd apply_dirichlet(const Discretization& disc, const VectorField& g, Eigen::VectorXd u) {
    const DofLayout& L = disc.layout();
    const int k = disc.k();
    if (u.size() != static_cast<Index>(L.size())) u = VectorXd::Zero(static_cast<Index>(L.size()));
    for (std::size_t f = 0; f < disc.mesh().num_faces(); ++f) {
        if (!disc.mesh().face(f).is_boundary()) continue;
        const FaceBasis fb = face_basis(disc.mesh(), f, k);
        const auto rule = quad_face(disc.mesh(), f, 2 * k + 8);
        for (int c = 0; c < 2; ++c)
            u.segment(static_cast<Index>(L.face_offset(f) + c * (k + 1)), k + 1) =
                l2_project(fb, [&](const Point& x) { return g(x)[c]; }, rule);
    }
    return u;
}

std::size_t condensed_size(const Discretization& disc) {
    return disc.mesh().num_interior_faces() * disc.layout().face_block() + disc.mesh().num_cells() + 1;
}

NavierStokesSystem::NavierStokesSystem(const Discretization& disc, Problem problem, Mode mode)
    : disc_(disc), problem_(std::move(problem)), mode_(mode), dirichlet_(dirichlet_mask(disc)) {
    force_.reserve(disc.mesh().num_cells());
    for (std::size_t c = 0; c < disc.mesh().num_cells(); ++c)
        force_.push_back(local_body_force(disc, c, problem_.f, mode, problem_.force_degree));
}

void NavierStokesSystem::local_system(std::size_t c, const Eigen::VectorXd& u, const Eigen::VectorXd& p, double dt,
                                      Eigen::MatrixXd& K, Eigen::VectorXd& b) const {
    const LocalOperators& ops = disc_.ops(c);
    const auto nd = static_cast<Index>(ops.ndofs()), nk = static_cast<Index>(ops.nk());
    const VectorXd ul = disc_.layout().gather(disc_.mesh(), c, u);
    const VectorXd pl = p.segment(static_cast<Index>(disc_.pressure_offset(c)), nk);
    const MatrixXd B = local_coupling(disc_, c);
    K.setZero(nd + nk, nd + nk);
    b.resize(nd + nk);
    K.topLeftCorner(nd, nd) = problem_.nu * ops.A;
    VectorXd ru = K.topLeftCorner(nd, nd) * ul + B.transpose() * pl - force_[c];
    if (problem_.convection) {
        VectorXd rt;
        MatrixXd J;
        local_convection(disc_, c, ul, mode_, &rt, &J);
        ru += rt;
        K.topLeftCorner(nd, nd) += J;
    }
    if (dt > 0. && std::isfinite(dt)) {
        const double m = disc_.mesh().cell(c).area / dt;
        for (Index i = 0; i < 2 * nk; ++i) K(i, i) += m;
    }
    K.topRightCorner(nd, nk) = B.transpose();
    K.bottomLeftCorner(nk, nd) = B;
    b.head(nd) = -ru;
    b.tail(nk) = -(B * ul);
}

Residual NavierStokesSystem::residual(const Eigen::VectorXd& u, const Eigen::VectorXd& p, double mu) const {
    Residual r;
    r.momentum = VectorXd::Zero(u.size());
    r.mass = VectorXd::Zero(p.size());
    r.magnitude = VectorXd::Zero(u.size());
    const auto nk = static_cast<Index>(dim_pk(disc_.k()));
    for (std::size_t c = 0; c < disc_.mesh().num_cells(); ++c) {
        const LocalOperators& ops = disc_.ops(c);
        const auto nd = static_cast<Index>(ops.ndofs());
        const VectorXd ul = disc_.layout().gather(disc_.mesh(), c, u);
        const VectorXd pl = p.segment(static_cast<Index>(disc_.pressure_offset(c)), nk);
        const MatrixXd B = local_coupling(disc_, c);
        VectorXd ru = problem_.nu * (ops.A * ul) + B.transpose() * pl - force_[c];
        VectorXd mag = problem_.nu * (ops.A.cwiseAbs() * ul.cwiseAbs()) + B.transpose().cwiseAbs() * pl.cwiseAbs() +
                       force_[c].cwiseAbs();
        if (problem_.convection) {
            VectorXd rt;
            local_convection(disc_, c, ul, mode_, &rt, nullptr);
            ru += rt;
            mag += rt.cwiseAbs();
        }
        const auto idx = disc_.layout().local_to_global(disc_.mesh(), c);
        for (Index i = 0; i < nd; ++i) {
            r.momentum[static_cast<Index>(idx[static_cast<std::size_t>(i)])] += ru[i];
            r.magnitude[static_cast<Index>(idx[static_cast<std::size_t>(i)])] += mag[i];
        }
        const double area = disc_.mesh().cell(c).area;
        r.mass.segment(static_cast<Index>(disc_.pressure_offset(c)), nk) = B * ul;
        r.mass[static_cast<Index>(disc_.pressure_offset(c))] += area * mu;
        r.mean += area * pl[0];
    }
    for (std::size_t i = 0; i < dirichlet_.size(); ++i)
        if (dirichlet_[i]) {
            r.momentum[static_cast<Index>(i)] = 0.;
            r.magnitude[static_cast<Index>(i)] = 0.;
        }
    return r;
}

NavierStokesSystem::Full NavierStokesSystem::assemble_full(const Eigen::VectorXd& u, const Eigen::VectorXd& p, double mu,
                                                           double dt) const {
    Full out;
    std::vector<std::size_t> vmap(dirichlet_.size(), npos);
    for (std::size_t i = 0; i < dirichlet_.size(); ++i)
        if (!dirichlet_[i]) {
            vmap[i] = out.free_velocity.size();
            out.free_velocity.push_back(i);
        }
    const std::size_t nv = out.free_velocity.size(), np = disc_.num_pressure_dofs(), n = nv + np + 1;
    std::vector<Triplet> trip;
    out.rhs = VectorXd::Zero(static_cast<Index>(n));
    MatrixXd K;
    VectorXd b;
    for (std::size_t c = 0; c < disc_.mesh().num_cells(); ++c) {
        local_system(c, u, p, dt, K, b);
        const auto vidx = disc_.layout().local_to_global(disc_.mesh(), c);
        std::vector<std::size_t> g(static_cast<std::size_t>(K.rows()));
        for (std::size_t i = 0; i < vidx.size(); ++i) g[i] = vmap[vidx[i]];
        for (std::size_t i = vidx.size(); i < g.size(); ++i) g[i] = nv + disc_.pressure_offset(c) + (i - vidx.size());
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (g[i] == npos) continue;
            out.rhs[static_cast<Index>(g[i])] += b[static_cast<Index>(i)];
            for (std::size_t j = 0; j < g.size(); ++j)
                if (g[j] != npos) trip.emplace_back(static_cast<Index>(g[i]), static_cast<Index>(g[j]), K(static_cast<Index>(i), static_cast<Index>(j)));
        }
        const double area = disc_.mesh().cell(c).area;
        const auto pbar = static_cast<Index>(nv + disc_.pressure_offset(c));
        trip.emplace_back(pbar, static_cast<Index>(n - 1), area);
        trip.emplace_back(static_cast<Index>(n - 1), pbar, area);
        out.rhs[pbar] -= area * mu;
        out.rhs[static_cast<Index>(n - 1)] -= area * p[static_cast<Index>(disc_.pressure_offset(c))];
    }
    out.K.resize(static_cast<Index>(n), static_cast<Index>(n));
    out.K.setFromTriplets(trip.begin(), trip.end());
    return out;
}

NavierStokesSystem::Condensed NavierStokesSystem::static_condense(const Eigen::VectorXd& u, const Eigen::VectorXd& p,
                                                                  double mu, double dt) const {
    Condensed out;
    const PolyMesh& mesh = disc_.mesh();
    const DofLayout& L = disc_.layout();
    out.face_unknown.assign(L.size(), npos);
    std::size_t nfree = 0;
    for (std::size_t f = 0; f < mesh.num_faces(); ++f)
        if (!mesh.face(f).is_boundary())
            for (std::size_t i = 0; i < L.face_block(); ++i) out.face_unknown[L.face_offset(f) + i] = nfree++;
    const std::size_t nc = mesh.num_cells(), n = nfree + nc + 1;
    out.rhs = VectorXd::Zero(static_cast<Index>(n));
    out.recovery.resize(nc);
    out.recovery_rhs.resize(nc);
    out.retained.resize(nc);
    std::vector<Triplet> trip;
    const auto nk = static_cast<Index>(dim_pk(disc_.k()));
    MatrixXd K;
    VectorXd b;
    for (std::size_t c = 0; c < nc; ++c) {
        local_system(c, u, p, dt, K, b);
        const auto nd = static_cast<Index>(disc_.ops(c).ndofs());
        const auto vidx = L.local_to_global(mesh, c);
        std::vector<Index> I, R;
        std::vector<std::size_t>& ret = out.retained[c];
        for (Index i = 0; i < 2 * nk; ++i) I.push_back(i);
        for (Index i = nd + 1; i < nd + nk; ++i) I.push_back(i);
        for (Index i = 2 * nk; i < nd; ++i) {
            const std::size_t gi = out.face_unknown[vidx[static_cast<std::size_t>(i)]];
            if (gi == npos) continue;
            R.push_back(i);
            ret.push_back(gi);
        }
        R.push_back(nd);
        ret.push_back(nfree + c);
        const auto ni = static_cast<Index>(I.size()), nr = static_cast<Index>(R.size());
        MatrixXd KII(ni, ni), KIR(ni, nr), KRI(nr, ni), KRR(nr, nr);
        VectorXd bI(ni), bR(nr);
        for (Index i = 0; i < ni; ++i) {
            bI[i] = b[I[i]];
            for (Index j = 0; j < ni; ++j) KII(i, j) = K(I[i], I[j]);
            for (Index j = 0; j < nr; ++j) KIR(i, j) = K(I[i], R[j]);
        }
        for (Index i = 0; i < nr; ++i) {
            bR[i] = b[R[i]];
            for (Index j = 0; j < ni; ++j) KRI(i, j) = K(R[i], I[j]);
            for (Index j = 0; j < nr; ++j) KRR(i, j) = K(R[i], R[j]);
        }
        Eigen::FullPivLU<MatrixXd> lu(KII);
        if (lu.rank() < ni) throw SolverError("singular cell block in static condensation, cell " + std::to_string(c));
        out.recovery[c] = lu.solve(KIR);
        out.recovery_rhs[c] = lu.solve(bI);
        const MatrixXd S = KRR - KRI * out.recovery[c];
        const VectorXd g = bR - KRI * out.recovery_rhs[c];
        for (Index i = 0; i < nr; ++i) {
            out.rhs[static_cast<Index>(ret[static_cast<std::size_t>(i)])] += g[i];
            for (Index j = 0; j < nr; ++j)
                trip.emplace_back(static_cast<Index>(ret[static_cast<std::size_t>(i)]), static_cast<Index>(ret[static_cast<std::size_t>(j)]), S(i, j));
        }
        const double area = mesh.cell(c).area;
        const auto pbar = static_cast<Index>(nfree + c);
        trip.emplace_back(pbar, static_cast<Index>(n - 1), area);
        trip.emplace_back(static_cast<Index>(n - 1), pbar, area);
        out.rhs[pbar] -= area * mu;
        out.rhs[static_cast<Index>(n - 1)] -= area * p[static_cast<Index>(disc_.pressure_offset(c))];
    }
    out.K.resize(static_cast<Index>(n), static_cast<Index>(n));
    out.K.setFromTriplets(trip.begin(), trip.end());
    return out;
}

void NavierStokesSystem::recover(const Condensed& sys, const Eigen::VectorXd& x, Eigen::VectorXd& du, Eigen::VectorXd& dp,
                                 double& dmu) const {
    const PolyMesh& mesh = disc_.mesh();
    const DofLayout& L = disc_.layout();
    du = VectorXd::Zero(static_cast<Index>(L.size()));
    dp = VectorXd::Zero(static_cast<Index>(disc_.num_pressure_dofs()));
    const auto nk = static_cast<Index>(dim_pk(disc_.k()));
    for (std::size_t i = 0; i < L.size(); ++i)
        if (sys.face_unknown[i] != npos) du[static_cast<Index>(i)] = x[static_cast<Index>(sys.face_unknown[i])];
    for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
        const auto& ret = sys.retained[c];
        VectorXd xr(static_cast<Index>(ret.size()));
        for (std::size_t i = 0; i < ret.size(); ++i) xr[static_cast<Index>(i)] = x[static_cast<Index>(ret[i])];
        const VectorXd xi = sys.recovery_rhs[c] - sys.recovery[c] * xr;
        du.segment(static_cast<Index>(L.cell_offset(c)), 2 * nk) = xi.head(2 * nk);
        const auto po = static_cast<Index>(disc_.pressure_offset(c));
        dp[po] = xr[xr.size() - 1];
        dp.segment(po + 1, nk - 1) = xi.tail(nk - 1);
    }
    dmu = x[x.size() - 1];
}

bool CondensedSolver::factorize(const NavierStokesSystem::Condensed& cs, std::size_t num_cells) {
    const Index m = cs.K.rows() - 1;
    nc_ = static_cast<Index>(num_cells);
    pin_ = m - nc_;
    col_ = VectorXd::Zero(m);
    row_ = VectorXd::Zero(m);
    std::vector<Triplet> trip;
    trip.reserve(static_cast<std::size_t>(cs.K.nonZeros()));
    for (Index j = 0; j < cs.K.outerSize(); ++j)
        for (SparseMatrix::InnerIterator it(cs.K, j); it; ++it) {
            const Index i = it.row();
            if (j == m) {
                if (i < m) col_[i] = it.value();
            } else if (i == m) {
                row_[j] = it.value();
            } else if (i != pin_ && j != pin_) {
                trip.emplace_back(i, j, it.value());
            }
        }
    trip.emplace_back(pin_, pin_, 1.);
    SparseMatrix K(m, m);
    K.setFromTriplets(trip.begin(), trip.end());
    K.makeCompressed();
    if (!analyzed_) {
        lu_.analyzePattern(K);
        analyzed_ = true;
    }
    lu_.factorize(K);
    return lu_.info() == Eigen::Success;
}

Eigen::VectorXd CondensedSolver::solve(const Eigen::VectorXd& rhs) const {
    const Index m = rhs.size() - 1;
    // the cell-mean mass rows sum to zero on the velocity and pressure unknowns
    const double mu = rhs.segment(pin_, nc_).sum() / col_.segment(pin_, nc_).sum();
    VectorXd r = rhs.head(m) - mu * col_;
    r[pin_] = 0.;
    VectorXd x(m + 1);
    x.head(m) = lu_.solve(r);
    // a constant pressure is in the kernel: shift it to satisfy the constraint row
    x.segment(pin_, nc_).array() += (rhs[m] - row_.dot(x.head(m))) / row_.segment(pin_, nc_).sum();
    x[m] = mu;
    return x;
}

NewtonPTCState ptc_newton_solve(const Discretization& disc, const Problem& problem, const SolverConfig& config,
                                const NewtonPTCState* initial) {
    if (!(config.dt0 > 0.)) throw SolverError("dt0 must be positive");
    if (config.max_iter < 0) throw SolverError("max_iter must be >= 0");
    const NavierStokesSystem sys(disc, problem, config.mode);
    NewtonPTCState st;
    if (initial) {
        st = *initial;
        st.residuals.clear();
        st.mass_residuals.clear();
        st.iterations = 0;
        st.converged = false;
    } else {
        st.u = VectorXd::Zero(static_cast<Index>(disc.num_velocity_dofs()));
        st.p = VectorXd::Zero(static_cast<Index>(disc.num_pressure_dofs()));
    }
    st.u = apply_dirichlet(disc, problem.g, st.u);
    // a linear problem needs no pseudo-time damping: one Newton step solves it
    const bool linear = !problem.convection;
    st.dt = linear ? std::numeric_limits<double>::infinity() : config.dt0;

    auto measure = [&](double& mom, double& mass) {
        const Residual r = sys.residual(st.u, st.p, st.mu);
        mom = r.momentum.norm();
        mass = std::sqrt(r.mass.squaredNorm() + r.mean * r.mean);
        // a residual cannot be resolved below the rounding level of its own terms
        const double floor = config.floor_factor * std::numeric_limits<double>::epsilon() * r.magnitude.norm();
        st.tolerance = std::max(config.stop_tol, floor);
    };
    double rn, mass;
    measure(rn, mass);
    st.residuals.push_back(rn);
    st.mass_residuals.push_back(mass);
    double best = rn, prev = rn;
    CondensedSolver lu;
    st.status = "max_iter reached";
    while (true) {
        if (rn < st.tolerance) {
            st.converged = true;
            st.status = st.tolerance > config.stop_tol ? "converged at rounding floor" : "converged";
            break;
        }
        if (st.iterations >= config.max_iter) break;
        auto cs = sys.static_condense(st.u, st.p, st.mu, st.dt);
        if (!lu.factorize(cs, disc.mesh().num_cells())) {
            st.status = "sparse factorization failed: " + lu.error();
            break;
        }
        const VectorXd x = lu.solve(cs.rhs);
        VectorXd du, dp;
        double dmu;
        sys.recover(cs, x, du, dp, dmu);
        st.u += du;
        st.p += dp;
        st.mu += dmu;
        ++st.iterations;
        measure(rn, mass);
        st.residuals.push_back(rn);
        st.mass_residuals.push_back(mass);
        if (config.verbose)
            std::cerr << "ptc it " << st.iterations << " dt " << st.dt << " |r| " << rn << " |mass| " << mass << '\n';
        if (!std::isfinite(rn) || rn > config.divergence_factor * best) {
            st.status = "diverged";
            break;
        }
        best = std::min(best, rn);
        if (!linear) st.dt = std::clamp(st.dt * prev / rn, config.dt0, config.dt_max);
        prev = rn;
    }
    // report the pressure with zero mean
    const double mean = pressure_integral(disc, st.p) / disc.mesh().total_area();
    for (std::size_t c = 0; c < disc.mesh().num_cells(); ++c) st.p[static_cast<Index>(disc.pressure_offset(c))] -= mean;
    return st;
}

}  // namespace polyhho
