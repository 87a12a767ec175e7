#include <cmath>
#include <random>

#include <Eigen/SparseCholesky>
#include <gtest/gtest.h>

#include "oracles.hpp"
#include "polyhho/solver.hpp"

using namespace polyhho;

namespace {

Eigen::VectorXd random_vector(Eigen::Index n, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> U(-1., 1.);
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = U(rng);
    return v;
}

}  // namespace

TEST(Viscous, ConstantsInKernelAndSymmetric) {
    const Discretization disc(gen_hexagonal(3), 1);
    const SparseMatrix A = assemble_viscous(disc);
    const Eigen::VectorXd c = interpolate(disc.mesh(), 1, [](const Point&) { return Point(2., -1.); });
    EXPECT_LT((A * c).norm(), 1e-12);
    EXPECT_LT((SparseMatrix(A.transpose()) - A).norm(), 1e-13 * A.norm());
}

TEST(Coupling, ConstantsAndLinearField) {
    for (MeshFamily f : {MeshFamily::cartesian, MeshFamily::hexagonal, MeshFamily::kershaw})
        for (int k = 0; k <= 2; ++k) {
            const Discretization disc(generate(f, 3), k);
            const SparseMatrix B = assemble_coupling(disc);
            const Eigen::VectorXd c = interpolate(disc.mesh(), k, [](const Point&) { return Point(1., 3.); });
            EXPECT_LT((B * c).norm(), 1e-12);
            const Eigen::VectorXd lin = interpolate(disc.mesh(), k, [](const Point& x) { return x; });
            // q = 1: the constant mode has coefficient 1 in the orthonormal cell basis
            Eigen::VectorXd one = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(disc.num_pressure_dofs()));
            for (std::size_t cell = 0; cell < disc.mesh().num_cells(); ++cell) one[static_cast<Eigen::Index>(disc.pressure_offset(cell))] = 1.;
            EXPECT_NEAR(one.dot(B * lin), -2., 1e-12);
        }
}

TEST(Coupling, MatchesQuadratureOracle) {
    const Discretization disc(gen_kershaw(3), 1);
    const PolyMesh& m = disc.mesh();
    const Eigen::VectorXd v = random_vector(static_cast<Eigen::Index>(disc.num_velocity_dofs()), 1u);
    const Eigen::VectorXd q = random_vector(static_cast<Eigen::Index>(disc.num_pressure_dofs()), 2u);
    double ref = 0.;
    for (std::size_t c = 0; c < m.num_cells(); ++c) {
        const LocalOperators& ops = disc.ops(c);
        const auto D = oracle::divergence(m, ops, disc.layout().gather(m, c, v));
        const Eigen::VectorXd qc = q.segment(static_cast<Eigen::Index>(disc.pressure_offset(c)), 3);
        for (const auto& p : oracle::cell_rule(m, c, 6)) ref -= p.w * D(p.x) * ops.basis.values(p.x).head(3).dot(qc);
    }
    EXPECT_NEAR(q.dot(assemble_coupling(disc) * v), ref, 1e-12 * (1. + std::abs(ref)));
}

TEST(BodyForce, ZeroLoadAndClassicGapShrinks) {
    const VectorField zero = [](const Point&) { return Point(0., 0.); };
    const VectorField phi = [](const Point& x) { return Point(std::sin(3. * x.y()) + x.x(), std::cos(2. * x.x() * x.y())); };
    std::vector<double> gaps, hs;
    for (std::size_t n : {4u, 8u, 16u}) {
        const Discretization disc(gen_cartesian(n), 0);
        EXPECT_EQ(assemble_body_force(disc, zero, Mode::robust).norm(), 0.);
        const Eigen::VectorXd diff = assemble_body_force(disc, phi, Mode::robust) - assemble_body_force(disc, phi, Mode::classic);
        // dual norm over the discrete H^1_0 space: diff^T A^{-1} diff on the free dofs
        const std::vector<bool> mask = dirichlet_mask(disc);
        std::vector<Eigen::Index> free;
        for (std::size_t i = 0; i < mask.size(); ++i)
            if (!mask[i]) free.push_back(static_cast<Eigen::Index>(i));
        const SparseMatrix A = assemble_viscous(disc);
        std::vector<Eigen::Index> pos(mask.size(), -1);
        for (std::size_t i = 0; i < free.size(); ++i) pos[static_cast<std::size_t>(free[i])] = static_cast<Eigen::Index>(i);
        std::vector<Eigen::Triplet<double>> t;
        for (int o = 0; o < A.outerSize(); ++o)
            for (SparseMatrix::InnerIterator it(A, o); it; ++it)
                if (pos[static_cast<std::size_t>(it.row())] >= 0 && pos[static_cast<std::size_t>(it.col())] >= 0)
                    t.emplace_back(pos[static_cast<std::size_t>(it.row())], pos[static_cast<std::size_t>(it.col())], it.value());
        SparseMatrix Af(static_cast<Eigen::Index>(free.size()), static_cast<Eigen::Index>(free.size()));
        Af.setFromTriplets(t.begin(), t.end());
        Eigen::VectorXd r(static_cast<Eigen::Index>(free.size()));
        for (std::size_t i = 0; i < free.size(); ++i) r[static_cast<Eigen::Index>(i)] = diff[free[i]];
        Eigen::SimplicialLDLT<SparseMatrix> ldlt(Af);
        gaps.push_back(std::sqrt(r.dot(ldlt.solve(r))));
        hs.push_back(disc.mesh().meshsize());
    }
    for (std::size_t i = 1; i < gaps.size(); ++i) EXPECT_GT(std::log(gaps[i - 1] / gaps[i]) / std::log(hs[i - 1] / hs[i]), 0.8);
}

TEST(Trilinear, AntisymmetricInTheLastTwoArguments) {
    for (Mode mode : {Mode::robust, Mode::classic})
        for (int k = 0; k <= 2; ++k) {
            const Discretization disc(gen_hexagonal(2), k);
            const auto n = static_cast<Eigen::Index>(disc.num_velocity_dofs());
            const Eigen::VectorXd w = random_vector(n, 1u), v = random_vector(n, 2u), z = random_vector(n, 3u);
            const double a = trilinear_apply(disc, w, v, z, mode), b = trilinear_apply(disc, w, z, v, mode);
            EXPECT_NEAR(a, -b, 1e-12 * (1. + std::abs(a)));
            EXPECT_NEAR(trilinear_apply(disc, w, v, v, mode), 0., 1e-12 * w.norm() * v.squaredNorm());
        }
}

TEST(Trilinear, ExpandedFormMatchesMaterializedSubmeshGradient) {
    for (int k = 0; k <= 2; ++k) {
        const Discretization disc(gen_hexagonal(2), k);
        const auto n = static_cast<Eigen::Index>(disc.num_velocity_dofs());
        const Eigen::VectorXd w = random_vector(n, 4u), v = random_vector(n, 5u), z = random_vector(n, 6u);
        const double fast = trilinear_apply(disc, w, v, z, Mode::robust);
        const double direct = oracle::trilinear_direct(disc, w, v, z);
        EXPECT_NEAR(fast, direct, 1e-11 * (1. + std::abs(direct))) << "k " << k;
    }
}

TEST(Trilinear, ConvectionResidualIsTheFormTestedWithUnitVectors) {
    for (Mode mode : {Mode::robust, Mode::classic}) {
        const Discretization disc(gen_kershaw(2), 1);
        const auto n = static_cast<Eigen::Index>(disc.num_velocity_dofs());
        const Eigen::VectorXd u = random_vector(n, 7u), z = random_vector(n, 8u);
        EXPECT_NEAR(convection_residual(disc, u, mode).dot(z), trilinear_apply(disc, u, u, z, mode), 1e-12);
    }
}

TEST(Trilinear, JacobianMatchesFiniteDifferences) {
    for (Mode mode : {Mode::robust, Mode::classic})
        for (int k = 0; k <= 2; ++k) {
            const Discretization disc(gen_hexagonal(2), k);
            const auto n = static_cast<Eigen::Index>(disc.num_velocity_dofs());
            const Eigen::VectorXd u = random_vector(n, 9u), du = random_vector(n, 10u);
            const SparseMatrix J = trilinear_jacobian(disc, u, mode);
            const double eps = 1e-3;
            // the residual is quadratic, so central differences are exact up to rounding
            const Eigen::VectorXd fd =
                (convection_residual(disc, u + eps * du, mode) - convection_residual(disc, u - eps * du, mode)) / (2. * eps);
            EXPECT_LT((J * du - fd).norm(), 1e-9 * (1. + fd.norm()));
        }
}

TEST(Pressure, ProjectionHasZeroMean) {
    const Discretization disc(gen_hexagonal(3), 1);
    const Eigen::VectorXd p = project_pressure(disc, [](const Point& x) { return std::exp(x.x()) + x.y(); });
    EXPECT_NEAR(pressure_integral(disc, p), 0., 1e-14);
}

TEST(ErrorNorms, InterpolantHasZeroErrorAndShiftsAreIgnored) {
    const Discretization disc(gen_kershaw(3), 1);
    const VectorField u = [](const Point& x) { return Point(std::sin(x.y()), x.x() * x.x()); };
    const ScalarField p = [](const Point& x) { return std::cos(x.x() + x.y()); };
    const Eigen::VectorXd uh = interpolate(disc.mesh(), 1, u);
    Eigen::VectorXd ph = project_pressure(disc, p);
    const ErrorNorms e = error_norms(disc, uh, ph, u, p, 0.5);
    EXPECT_LT(e.energy, 1e-13);
    EXPECT_LT(e.l2_velocity, 1e-13);
    EXPECT_LT(e.l2_pressure, 1e-13);
    for (std::size_t c = 0; c < disc.mesh().num_cells(); ++c) ph[static_cast<Eigen::Index>(disc.pressure_offset(c))] += 3.;
    const ScalarField shifted = [&](const Point& x) { return p(x) - 7.; };
    EXPECT_LT(error_norms(disc, uh, ph, u, shifted, 0.5).l2_pressure, 1e-13);
}
