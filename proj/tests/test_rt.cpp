#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace polyhho;

namespace {

Eigen::VectorXd random_vector(Eigen::Index n, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> U(-1., 1.);
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = U(rng);
    return v;
}

PolyMesh hexagon() {
    std::vector<Point> v;
    std::vector<std::size_t> loop;
    for (int i = 0; i < 6; ++i) {
        const double a = std::acos(-1.) * i / 3. + 0.2;
        v.emplace_back(0.5 + 0.4 * std::cos(a), 0.5 + 0.35 * std::sin(a));
        loop.push_back(static_cast<std::size_t>(i));
    }
    return build_mesh(v, {loop});
}

std::vector<PolyMesh> sample_meshes() { return {gen_cartesian(3), gen_hexagonal(3), gen_kershaw(3), hexagon()}; }

struct CellSetup {
    LocalOperators ops;
    RTSpace rt;
    CellSetup(const PolyMesh& m, std::size_t c, int k) : ops(build_local_operators(m, c, k)), rt(m, c, k) {
        ops.R = reconstruction_map(m, ops, rt);
    }
};

}  // namespace

TEST(RTSpace, Dimensions) {
    const PolyMesh sq = gen_cartesian(1);
    const RTSpace r0(sq, 0, 0);
    EXPECT_EQ(r0.size(), 5u);
    EXPECT_EQ(r0.num_boundary_dofs(), 4u);
    const PolyMesh tri = build_mesh({{0., 0.}, {1., 0.}, {0., 1.}}, {{0, 1, 2}});
    const RTSpace r1(tri, 0, 1);
    EXPECT_EQ(r1.size(), 8u);
    EXPECT_EQ(r1.local_size(), 8u);
    EXPECT_EQ(r1.num_free_dofs(), 2u);
}

TEST(RTSpace, NormEquivalenceOnRandomFields) {
    const PolyMesh m = hexagon();
    const int k = 1;
    const RTSpace rt(m, 0, k);
    const auto& st = m.subtriangulation(0);
    for (unsigned s = 0; s < 20; ++s) {
        const Eigen::VectorXd w = random_vector(static_cast<Eigen::Index>(rt.size()), s);
        double l2 = 0., equiv = 0.;
        for (std::size_t t = 0; t < st.simplices.size(); ++t) {
            const auto& sim = st.simplices[t];
            const Point a = m.vertex(sim.vertices[0]), b = m.vertex(sim.vertices[1]), c = m.vertex(sim.vertices[2]);
            const QuadRule r = quad_triangle(a, b, c, 2 * k + 2);
            for (const auto& q : r) l2 += q.w * rt.evaluate(w, t, q.x).squaredNorm();
            for (int comp = 0; comp < 2; ++comp) {
                const auto p = oracle::dense_projection(r, k - 1, sim.centroid, sim.diameter,
                                                        [&](const Point& x) { return rt.evaluate(w, t, x)[comp]; });
                for (const auto& q : r) equiv += q.w * p(q.x) * p(q.x);
            }
            const std::array<Point, 3> p{a, b, c};
            for (int e = 0; e < 3; ++e) {
                const Point u = p[static_cast<std::size_t>(e)], v = p[static_cast<std::size_t>((e + 1) % 3)];
                const Point n = Point((v - u).y(), -(v - u).x()).normalized();
                double f = 0.;
                for (const auto& q : quad_segment(u, v, 2 * k + 2)) f += q.w * std::pow(rt.evaluate(w, t, q.x).dot(n), 2);
                equiv += (v - u).norm() * f;
            }
        }
        const double ratio = l2 / equiv;
        EXPECT_GT(ratio, 1e-3);
        EXPECT_LT(ratio, 1e3);
    }
}

TEST(Lifting, ZeroFaceValuesGiveZero) {
    const PolyMesh m = hexagon();
    const CellSetup s(m, 0, 1);
    Eigen::VectorXd d = random_vector(static_cast<Eigen::Index>(s.ops.ndofs()), 3u);
    d.tail(static_cast<Eigen::Index>(s.ops.ndofs() - s.ops.cell_dofs())).setZero();
    EXPECT_LT((boundary_lifting(m, s.rt, s.ops) * d).norm(), 1e-15);
}

TEST(Lifting, SingleNormalFaceValueSelectsOneEdgeFunction) {
    const PolyMesh m = gen_cartesian(1);
    const CellSetup s(m, 0, 0);
    for (std::size_t i = 0; i < 4; ++i) {
        Eigen::VectorXd d = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(s.ops.ndofs()));
        const Point n = s.ops.normals[i];
        d[static_cast<Eigen::Index>(s.ops.face_index(i, 0, 0))] = n.x();
        d[static_cast<Eigen::Index>(s.ops.face_index(i, 1, 0))] = n.y();
        const Eigen::VectorXd w = boundary_lifting(m, s.rt, s.ops) * d;
        int nonzero = 0;
        for (Eigen::Index j = 0; j < w.size(); ++j)
            if (std::abs(w[j]) > 1e-14) ++nonzero;
        EXPECT_EQ(nonzero, 1);
        EXPECT_NEAR(w.cwiseAbs().maxCoeff(), 1., 1e-14);
        // the lifted field carries unit outward flux through face i only
        const Point a = m.vertex(m.cell(0).vertices[i]), b = m.vertex(m.cell(0).vertices[(i + 1) % 4]);
        double flux = 0.;
        for (const auto& q : quad_segment(a, b, 2)) flux += q.w * s.rt.evaluate(w, m.subtriangulation(0).face_simplex[i], q.x).dot(n);
        EXPECT_NEAR(flux, 1., 1e-14);
    }
}

TEST(Reconstruction, ZeroInZeroOut) {
    const PolyMesh m = hexagon();
    for (int k = 0; k <= 2; ++k) {
        const CellSetup s(m, 0, k);
        EXPECT_EQ((s.ops.R * Eigen::VectorXd::Zero(static_cast<Eigen::Index>(s.ops.ndofs()))).norm(), 0.);
    }
}

TEST(Reconstruction, ReproducesCellPolynomials) {
    for (const PolyMesh& m : sample_meshes())
        for (int k = 0; k <= 2; ++k)
            for (std::size_t c = 0; c < m.num_cells(); c += 3) {
                const CellSetup s(m, c, k);
                const VectorField w = [k](const Point& x) {
                    return Point(std::pow(x.x(), k) - (k > 0) * 2. * x.y() + 0.5, (k > 1) * x.x() * x.y() + (k > 0) * x.x() - 1.);
                };
                const Eigen::VectorXd R = s.ops.R * interpolate_local(m, s.ops, w);
                const auto& st = m.subtriangulation(c);
                for (std::size_t t = 0; t < st.simplices.size(); ++t) {
                    const auto& sim = st.simplices[t];
                    for (const auto& q : quad_triangle(m.vertex(sim.vertices[0]), m.vertex(sim.vertices[1]), m.vertex(sim.vertices[2]), 4))
                        EXPECT_LT((s.rt.evaluate(R, t, q.x) - w(q.x)).norm(), 1e-11);
                }
            }
}

TEST(Reconstruction, DivergenceEqualsDiscreteDivergencePointwise) {
    for (const PolyMesh& m : sample_meshes())
        for (int k = 0; k <= 2; ++k)
            for (std::size_t c = 0; c < m.num_cells(); c += 2) {
                const CellSetup s(m, c, k);
                const Eigen::VectorXd d = random_vector(static_cast<Eigen::Index>(s.ops.ndofs()), 31u + static_cast<unsigned>(c));
                const Eigen::VectorXd R = s.ops.R * d, D = s.ops.D * d;
                const auto& st = m.subtriangulation(c);
                for (std::size_t t = 0; t < st.simplices.size(); ++t) {
                    const auto& sim = st.simplices[t];
                    for (const auto& q : quad_triangle(m.vertex(sim.vertices[0]), m.vertex(sim.vertices[1]), m.vertex(sim.vertices[2]), 2 * k + 2)) {
                        const double dk = s.ops.basis.values(q.x).head(static_cast<Eigen::Index>(s.ops.nk())).dot(D);
                        EXPECT_NEAR(s.rt.evaluate_divergence(R, t, q.x), dk, 1e-11);
                    }
                }
            }
}

TEST(Reconstruction, ConsistentWithCellUnknownInLowerDegreeMoments) {
    for (const PolyMesh& m : sample_meshes())
        for (int k = 1; k <= 2; ++k)
            for (std::size_t c = 0; c < m.num_cells(); c += 2) {
                const CellSetup s(m, c, k);
                const Eigen::VectorXd d = random_vector(static_cast<Eigen::Index>(s.ops.ndofs()), 57u + static_cast<unsigned>(c));
                const Eigen::VectorXd R = s.ops.R * d;
                const Cell& T = m.cell(c);
                const auto& st = m.subtriangulation(c);
                Eigen::MatrixXd moments = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim_pk(k - 1)), 2);
                for (std::size_t t = 0; t < st.simplices.size(); ++t) {
                    const auto& sim = st.simplices[t];
                    for (const auto& q : quad_triangle(m.vertex(sim.vertices[0]), m.vertex(sim.vertices[1]), m.vertex(sim.vertices[2]), 2 * k + 2)) {
                        const Point diff = s.rt.evaluate(R, t, q.x) - s.ops.cell_value(d, q.x);
                        moments += q.w * oracle::monomials(k - 1, T.centroid, T.diameter, q.x) * diff.transpose();
                    }
                }
                EXPECT_LT(moments.norm() / T.area, 1e-11);
            }
}

TEST(Reconstruction, MatchesFullSaddlePointOracle) {
    for (const PolyMesh& m : sample_meshes())
        for (int k = 0; k <= 2; ++k)
            for (std::size_t c = 0; c < m.num_cells(); c += 4) {
                const CellSetup s(m, c, k);
                const Eigen::VectorXd d = random_vector(static_cast<Eigen::Index>(s.ops.ndofs()), 91u + static_cast<unsigned>(c));
                const Eigen::VectorXd ref = oracle::full_kkt_reconstruction(m, s.ops, s.rt, d);
                const Eigen::VectorXd R = solve_local_mixed(m, s.ops, s.rt, d);
                EXPECT_LT((R - ref).norm(), 1e-9 * ref.norm()) << "k " << k << " cell " << c;
            }
}

TEST(GlobalReconstruction, NormalTraceIsContinuousAcrossFaces) {
    for (const PolyMesh& m : sample_meshes()) {
        const int k = 1;
        const Discretization disc(m, k);
        const Eigen::VectorXd u = random_vector(static_cast<Eigen::Index>(disc.num_velocity_dofs()), 5u);
        const RTField R = disc.reconstruct(u);
        double worst = 0.;
        for (const Face& f : m.faces()) {
            if (f.is_boundary()) continue;
            auto simplex_of = [&](std::size_t cell) {
                const Cell& T = m.cell(cell);
                for (std::size_t i = 0; i < T.faces.size(); ++i)
                    if (&m.face(T.faces[i]) == &f) return m.subtriangulation(cell).face_simplex[i];
                return std::size_t{0};
            };
            const std::size_t tl = simplex_of(f.left), tr = simplex_of(f.right);
            for (int i = 1; i <= 5; ++i) {
                const Point x = m.vertex(f.v0) + (i / 6.) * (m.vertex(f.v1) - m.vertex(f.v0));
                worst = std::max(worst, std::abs((R.value(f.left, tl, x) - R.value(f.right, tr, x)).dot(f.normal)));
            }
        }
        EXPECT_LT(worst, 1e-11);
    }
}

TEST(GlobalReconstruction, DiscretelySolenoidalFieldsAreSolenoidal) {
    // the interpolant of a solenoidal field has zero discrete divergence by commutation
    const VectorField v = [](const Point& x) {
        return Point(std::sin(x.x()) * std::cos(x.y()), -std::cos(x.x()) * std::sin(x.y()));
    };
    for (const PolyMesh& m : sample_meshes())
        for (int k = 0; k <= 2; ++k) {
            const Discretization disc(m, k);
            const Eigen::VectorXd u = interpolate(m, k, v);
            ASSERT_LT((assemble_coupling(disc) * u).norm(), 1e-12);
            const RTField R = disc.reconstruct(u);
            double worst = 0.;
            for (std::size_t c = 0; c < m.num_cells(); ++c) {
                const auto& st = m.subtriangulation(c);
                for (std::size_t t = 0; t < st.simplices.size(); ++t) {
                    const auto& sim = st.simplices[t];
                    for (const auto& q : quad_triangle(m.vertex(sim.vertices[0]), m.vertex(sim.vertices[1]), m.vertex(sim.vertices[2]), 2 * k + 2))
                        worst = std::max(worst, std::abs(R.divergence(c, t, q.x)));
                }
            }
            EXPECT_LT(worst, 1e-10);
        }
}
