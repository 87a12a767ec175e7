#include "polyhho/bench.hpp"

#include <array>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>

namespace polyhho {

using Eigen::Index;
using Eigen::VectorXd;

namespace {

constexpr double kPi = 3.14159265358979323846;

double elapsed(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string sci(double v) {
    std::ostringstream s;
    s << std::scientific << std::setprecision(6) << v;
    return s.str();
}

std::string fixed3(double v) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(3) << v;
    return s.str();
}

std::string num(double v) {
    std::ostringstream s;
    s << std::setprecision(17) << v;
    return s.str();
}

}  // namespace

ExactSolution kovasznay_solution(double nu) {
    const double re = 1. / nu;
    const double g = re / 2. - std::sqrt(re * re / 4. + 4. * kPi * kPi);
    ExactSolution s;
    s.u = [g](const Point& x) {
        const double e = std::exp(g * x.x());
        return Point(1. - e * std::cos(2. * kPi * x.y()), g / (2. * kPi) * e * std::sin(2. * kPi * x.y()));
    };
    s.grad_u = [g](const Point& x) {
        const double e = std::exp(g * x.x());
        const double c = std::cos(2. * kPi * x.y()), sn = std::sin(2. * kPi * x.y());
        Eigen::Matrix2d m;
        m << -g * e * c, 2. * kPi * e * sn, g * g / (2. * kPi) * e * sn, g * e * c;
        return m;
    };
    const VectorField u = s.u;
    s.p = [g, u](const Point& x) { return -0.5 * std::exp(2. * g * x.x()) + 0.5 * u(x).squaredNorm(); };
    s.f = [](const Point&) { return Point(0., 0.); };
    return s;
}

ExactSolution robustness_solution(double lambda) {
    ExactSolution s;
    s.u = [](const Point& x) { return Point(-x.y(), x.x()); };
    s.grad_u = [](const Point&) {
        Eigen::Matrix2d m;
        m << 0., -1., 1., 0.;
        return m;
    };
    s.p = [lambda](const Point& x) { return lambda * x.x() * x.x() * x.x() + x.squaredNorm(); };
    s.f = [lambda](const Point& x) { return Point(3. * lambda * x.x() * x.x(), 0.); };
    return s;
}

std::vector<std::optional<double>> compute_eoc(const std::vector<double>& errors, const std::vector<double>& h,
                                               double roundoff) {
    if (errors.size() != h.size()) throw std::invalid_argument("compute_eoc: errors and h differ in length");
    std::vector<std::optional<double>> out(errors.size());
    for (std::size_t i = 1; i < errors.size(); ++i) {
        const double e0 = errors[i - 1], e1 = errors[i], h0 = h[i - 1], h1 = h[i];
        if (!(e0 > 0.) || !(e1 > 0.) || !(h0 > 0.) || !(h1 > 0.) || h0 == h1) continue;
        if (e0 <= roundoff || e1 <= roundoff) continue;
        const double v = std::log(e0 / e1) / std::log(h0 / h1);
        if (std::isfinite(v)) out[i] = v;
    }
    return out;
}

std::string format_eoc(const std::optional<double>& eoc) { return eoc ? fixed3(*eoc) : std::string("--"); }

bool ExperimentReport::all_converged() const {
    for (const auto& r : rows)
        if (!r.converged) return false;
    return true;
}

void ExperimentReport::update_eoc() {
    std::vector<double> h, ee, eu, ep;
    for (const auto& r : rows) {
        h.push_back(r.h);
        ee.push_back(r.err_energy);
        eu.push_back(r.err_u_l2);
        ep.push_back(r.err_p_l2);
    }
    const auto a = compute_eoc(ee, h, roundoff), b = compute_eoc(eu, h, roundoff), c = compute_eoc(ep, h, roundoff);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        rows[i].eoc_energy = a[i];
        rows[i].eoc_u = b[i];
        rows[i].eoc_p = c[i];
    }
}

std::string ExperimentReport::csv() const {
    std::ostringstream s;
    s << "level,N_dof,h,err_energy,eoc_energy,err_u_l2,eoc_u,err_p_l2,eoc_p,iters,seconds\n";
    for (const auto& r : rows)
        s << r.level << ',' << r.n_dof << ',' << sci(r.h) << ',' << sci(r.err_energy) << ',' << format_eoc(r.eoc_energy)
          << ',' << sci(r.err_u_l2) << ',' << format_eoc(r.eoc_u) << ',' << sci(r.err_p_l2) << ','
          << format_eoc(r.eoc_p) << ',' << r.iters << ',' << fixed3(r.seconds) << '\n';
    return s.str();
}

std::string ExperimentReport::dat() const {
    auto eoc = [](const std::optional<double>& v) { return v ? fixed3(*v) : std::string("NaN"); };
    std::ostringstream s;
    s << "# " << study << '\n';
    for (const auto& [key, val] : metadata) s << "# " << key << " = " << val << '\n';
    s << "# level N_dof h err_energy eoc_energy err_u_l2 eoc_u err_p_l2 eoc_p iters seconds\n";
    for (const auto& r : rows)
        s << r.level << ' ' << r.n_dof << ' ' << sci(r.h) << ' ' << sci(r.err_energy) << ' ' << eoc(r.eoc_energy) << ' '
          << sci(r.err_u_l2) << ' ' << eoc(r.eoc_u) << ' ' << sci(r.err_p_l2) << ' ' << eoc(r.eoc_p) << ' ' << r.iters
          << ' ' << fixed3(r.seconds) << '\n';
    return s.str();
}

std::string ExperimentReport::metadata_text() const {
    std::ostringstream s;
    s << "study=" << study << '\n';
    for (const auto& [key, val] : metadata) s << key << '=' << val << '\n';
    for (const auto& r : rows)
        if (!r.converged) s << "nonconverged_level_" << r.level << '=' << r.status << '\n';
    return s.str();
}

void ExperimentReport::write(const std::string& dir, const std::string& stem) const {
    std::filesystem::create_directories(dir);
    const std::filesystem::path base(dir);
    auto put = [&](const std::string& ext, const std::string& text) {
        std::ofstream out(base / (stem + ext));
        if (!out) throw std::runtime_error("cannot write " + (base / (stem + ext)).string());
        out << text;
    };
    put(".csv", csv());
    put(".dat", dat());
    put(".meta", metadata_text());
}

PolyMesh study_mesh(MeshFamily family, std::size_t base_n, int level) {
    if (level < 1) throw std::invalid_argument("levels are numbered from 1");
    return generate(family, base_n << (level - 1));
}

namespace {

/// Errors of order eps times the data size carry no rate information.
double roundoff_level(double lambda) { return 1e4 * std::numeric_limits<double>::epsilon() * (1. + std::abs(lambda)); }

std::vector<std::pair<std::string, std::string>> common_metadata(const StudyOptions& o, double nu, double lambda) {
    return {{"k", std::to_string(o.k)},
            {"nu", num(nu)},
            {"lambda", num(lambda)},
            {"family", family_name(o.family)},
            {"mode", mode_name(o.solver.mode)},
            {"domain", "(0,1)x(0,1)"},
            {"base_n", std::to_string(o.base_n)},
            {"levels", std::to_string(o.levels)},
            {"dt0", num(o.solver.dt0)},
            {"stop_tol", num(o.solver.stop_tol)},
            {"max_iter", std::to_string(o.solver.max_iter)},
            {"version", kVersion}};
}

LevelRow solve_level(const PolyMesh& mesh, int level, int k, const ExactSolution& ex, double nu,
                     const SolverConfig& config) {
    const auto t0 = std::chrono::steady_clock::now();
    Discretization disc(mesh, k);
    Problem pr;
    pr.f = ex.f;
    pr.g = ex.u;
    pr.nu = nu;
    const NewtonPTCState st = ptc_newton_solve(disc, pr, config);
    const ErrorNorms e = error_norms(disc, st.u, st.p, ex.u, ex.p, nu);
    LevelRow r;
    r.level = level;
    r.n_dof = condensed_size(disc);
    r.h = disc.mesh().meshsize();
    r.err_energy = e.energy;
    r.err_u_l2 = e.l2_velocity;
    r.err_p_l2 = e.l2_pressure;
    r.iters = st.iterations;
    r.converged = st.converged;
    r.status = st.status;
    r.seconds = elapsed(t0);
    return r;
}

}  // namespace

ExperimentReport run_kovasznay(const StudyOptions& opts) {
    ExperimentReport rep;
    rep.study = "kovasznay";
    rep.metadata = common_metadata(opts, opts.nu, 0.);
    const ExactSolution ex = kovasznay_solution(opts.nu);
    for (int l = 1; l <= opts.levels; ++l)
        rep.rows.push_back(solve_level(study_mesh(opts.family, opts.base_n, l), l, opts.k, ex, opts.nu, opts.solver));
    rep.roundoff = roundoff_level(0.);
    rep.update_eoc();
    return rep;
}

ExperimentReport run_robustness(const StudyOptions& opts) {
    ExperimentReport rep;
    rep.study = "robustness";
    rep.metadata = common_metadata(opts, 1., opts.lambda);
    const ExactSolution ex = robustness_solution(opts.lambda);
    for (int l = 1; l <= opts.levels; ++l)
        rep.rows.push_back(solve_level(study_mesh(opts.family, opts.base_n, l), l, opts.k, ex, 1., opts.solver));
    rep.roundoff = roundoff_level(opts.lambda);
    rep.update_eoc();
    return rep;
}

RobustnessSolve solve_robustness(const Discretization& disc, double lambda, const SolverConfig& config) {
    const ExactSolution ex = robustness_solution(lambda);
    Problem pr;
    pr.f = ex.f;
    pr.g = ex.u;
    pr.nu = 1.;
    RobustnessSolve out;
    out.state = ptc_newton_solve(disc, pr, config);
    out.u = out.state.u;
    out.p = out.state.p;
    out.errors = error_norms(disc, out.u, out.p, ex.u, ex.p, 1.);
    return out;
}

Point sample_velocity(const Discretization& disc, const Eigen::VectorXd& u, const Point& x) {
    const std::size_t c = disc.mesh().locate(x);
    if (c == kNoCell) throw std::invalid_argument("sample point outside the mesh");
    return disc.ops(c).cell_value(disc.layout().gather(disc.mesh(), c, u), x);
}

std::string CavityResult::dat() const {
    std::ostringstream s;
    s << "# s u1(1/2,s) u2(s,1/2)\n";
    for (std::size_t i = 0; i < this->s.size(); ++i)
        s << std::setprecision(10) << this->s[i] << ' ' << u1[i] << ' ' << u2[i] << '\n';
    return s.str();
}

CavityResult run_cavity(const CavityOptions& opts) {
    if (opts.samples < 2) throw std::invalid_argument("cavity profiles need at least 2 samples");
    const auto t0 = std::chrono::steady_clock::now();
    Discretization disc(opts.mesh ? *opts.mesh : generate(opts.family, opts.n), opts.k);
    Problem pr;
    pr.nu = 1. / opts.re;
    pr.convection = opts.convection;
    pr.g = [](const Point& x) { return x.y() > 1. - 1e-12 ? Point(1., 0.) : Point(0., 0.); };
    if (opts.lambda != 0.) {
        const Potential pot = potential_by_id(opts.psi);
        const double lambda = opts.lambda;
        const VectorField grad = pot.grad;
        pr.f = [lambda, grad](const Point& x) { return Point(lambda * grad(x)); };
    }
    CavityResult out;
    out.state = ptc_newton_solve(disc, pr, opts.solver);
    out.n_dof = condensed_size(disc);
    for (std::size_t i = 0; i < opts.samples; ++i) {
        const double s = static_cast<double>(i) / static_cast<double>(opts.samples - 1);
        out.s.push_back(s);
        out.u1.push_back(sample_velocity(disc, out.state.u, Point(0.5, s)).x());
        out.u2.push_back(sample_velocity(disc, out.state.u, Point(s, 0.5)).y());
    }
    out.seconds = elapsed(t0);
    return out;
}

namespace {

/// Polynomial sum c_ab x^a y^b of total degree <= deg.
struct RandomPoly {
    int deg = 0;
    std::vector<std::array<double, 3>> terms;  // a, b, coefficient

    RandomPoly(int degree, std::mt19937& rng) : deg(degree) {
        std::uniform_real_distribution<double> U(-1., 1.);
        for (int d = 0; d <= degree; ++d)
            for (int b = 0; b <= d; ++b) terms.push_back({double(d - b), double(b), U(rng)});
    }
    double value(const Point& x) const {
        double v = 0.;
        for (const auto& t : terms) v += t[2] * std::pow(x.x(), t[0]) * std::pow(x.y(), t[1]);
        return v;
    }
    Point grad(const Point& x) const {
        Point g(0., 0.);
        for (const auto& t : terms) {
            if (t[0] > 0) g.x() += t[2] * t[0] * std::pow(x.x(), t[0] - 1) * std::pow(x.y(), t[1]);
            if (t[1] > 0) g.y() += t[2] * t[1] * std::pow(x.x(), t[0]) * std::pow(x.y(), t[1] - 1);
        }
        return g;
    }
};

VectorXd random_vector(std::size_t n, std::mt19937& rng) {
    std::uniform_real_distribution<double> U(-1., 1.);
    VectorXd v(static_cast<Index>(n));
    for (Index i = 0; i < v.size(); ++i) v[i] = U(rng);
    return v;
}

struct SuiteAccumulator {
    double commutation = 0., divergence = 0., consistency = 0., exactness = 0., dissipation = 0., invariance = 0.;
};

void check_discretization(const Discretization& disc, const PropertyOptions& opts, std::mt19937& rng,
                          SuiteAccumulator& acc) {
    const PolyMesh& mesh = disc.mesh();
    const int k = disc.k();
    const auto nk = static_cast<Index>(dim_pk(k));
    const auto nkm = static_cast<Index>(dim_pk(k - 1));

    for (int s = 0; s < opts.samples; ++s) {
        const RandomPoly v0(k + 2, rng), v1(k + 2, rng);
        const VectorField v = [&](const Point& x) { return Point(v0.value(x), v1.value(x)); };
        const ScalarField div = [&](const Point& x) { return v0.grad(x).x() + v1.grad(x).y(); };
        for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
            const LocalOperators& ops = disc.ops(c);
            const VectorXd dofs = interpolate_local(mesh, ops, v);
            const VectorXd ref = l2_project_prefix(ops.basis, dim_pk(k), div, quad_cell(mesh, c, 2 * k + 4));
            acc.commutation = std::max(acc.commutation, (ops.D * dofs - ref).cwiseAbs().maxCoeff());
        }
    }

    for (int s = 0; s < opts.samples; ++s) {
        const VectorXd g = random_vector(disc.num_velocity_dofs(), rng);
        for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
            const LocalOperators& ops = disc.ops(c);
            const RTSpace& rt = disc.rt(c);
            const VectorXd dofs = disc.layout().gather(mesh, c, g);
            const VectorXd coeff = ops.R * dofs;
            const VectorXd dv = ops.D * dofs;
            Eigen::VectorXd proj = Eigen::VectorXd::Zero(2 * nkm);
            for (std::size_t t = 0; t < rt.num_simplices(); ++t) {
                for (const auto& q : quad_simplex(mesh, c, t, 2 * k + 2)) {
                    const VectorXd phi = ops.basis.values(q.x);
                    const double d = rt.evaluate_divergence(coeff, t, q.x) - phi.head(nk).dot(dv);
                    acc.divergence = std::max(acc.divergence, std::abs(d));
                    const Point diff = rt.evaluate(coeff, t, q.x) - ops.cell_value(dofs, q.x);
                    proj.head(nkm) += q.w * diff.x() * phi.head(nkm);
                    proj.tail(nkm) += q.w * diff.y() * phi.head(nkm);
                }
            }
            // Orthonormal basis with measure normalization: coefficient = integral / |T|.
            const double area = mesh.cell(c).area;
            acc.consistency = std::max(acc.consistency, std::sqrt(area) * (proj / area).norm());
        }
    }

    for (int s = 0; s < opts.samples; ++s) {
        const RandomPoly w0(k, rng), w1(k, rng);
        const VectorField w = [&](const Point& x) { return Point(w0.value(x), w1.value(x)); };
        for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
            const LocalOperators& ops = disc.ops(c);
            const RTSpace& rt = disc.rt(c);
            const VectorXd coeff = ops.R * interpolate_local(mesh, ops, w);
            for (std::size_t t = 0; t < rt.num_simplices(); ++t)
                for (const auto& q : quad_simplex(mesh, c, t, 2 * k + 2))
                    acc.exactness = std::max(acc.exactness, (rt.evaluate(coeff, t, q.x) - w(q.x)).cwiseAbs().maxCoeff());
        }
    }

    for (int s = 0; s < opts.samples; ++s) {
        const VectorXd w = random_vector(disc.num_velocity_dofs(), rng);
        const VectorXd v = random_vector(disc.num_velocity_dofs(), rng);
        const double t = trilinear_apply(disc, w, v, v, Mode::robust);
        acc.dissipation = std::max(acc.dissipation, std::abs(t) / (w.norm() * v.squaredNorm()));
    }

    const std::vector<bool> fixed = dirichlet_mask(disc);
    const SparseMatrix B = assemble_coupling(disc);
    for (int deg = 1; deg <= k + 3; ++deg) {
        const RandomPoly psi(deg, rng);
        const VectorXd l = assemble_body_force(disc, [&](const Point& x) { return psi.grad(x); }, Mode::robust);
        const VectorXd q = project_pressure(disc, [&](const Point& x) { return psi.value(x); });
        const VectorXd r = l - B.transpose() * q;
        for (Index i = 0; i < r.size(); ++i)
            if (!fixed[static_cast<std::size_t>(i)]) acc.invariance = std::max(acc.invariance, std::abs(r[i]));
    }
}

}  // namespace

std::vector<PropertyCheck> run_property_suite(const PropertyOptions& opts) {
    std::mt19937 rng(opts.seed);
    SuiteAccumulator acc;
    for (MeshFamily family : {MeshFamily::cartesian, MeshFamily::hexagonal, MeshFamily::kershaw}) {
        const PolyMesh mesh = generate(family, opts.n);
        for (int k : opts.degrees) {
            const Discretization disc(mesh, k);
            check_discretization(disc, opts, rng, acc);
        }
    }
    return {{"commutation D I v = pi div v", acc.commutation, 1e-11},
            {"divergence of R v equals D v", acc.divergence, 1e-10},
            {"pi^{k-1}(R v - v_T) = 0", acc.consistency, 1e-10},
            {"R I w = w on P^k", acc.exactness, 1e-11},
            {"non-dissipativity t(w,v,v)", acc.dissipation, 1e-12},
            {"velocity invariance l(grad psi) = b(., pi psi)", acc.invariance, 1e-11}};
}

}  // namespace polyhho
