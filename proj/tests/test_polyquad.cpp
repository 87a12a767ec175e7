#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace polyhho;

namespace {

double integrate(const QuadRule& r, const ScalarField& f) {
    double s = 0.;
    for (const auto& q : r) s += q.w * f(q.x);
    return s;
}

}  // namespace

TEST(Quadrature, ReferenceTriangleMoments) {
    const Point a(0., 0.), b(1., 0.), c(0., 1.);
    EXPECT_NEAR(integrate(quad_triangle(a, b, c, 0), [](const Point&) { return 1.; }), 0.5, 1e-15);
    EXPECT_NEAR(integrate(quad_triangle(a, b, c, 2), [](const Point& x) { return x.x() * x.y(); }), 1. / 24., 1e-15);
    // int x^8 over the unit square through its two-triangle fan
    const PolyMesh sq = gen_cartesian(1);
    EXPECT_NEAR(integrate(quad_cell(sq, 0, 8), [](const Point& x) { return std::pow(x.x(), 8); }), 1. / 9., 1e-14);
}

TEST(Quadrature, ExactnessUpToDeclaredDegree) {
    for (int d = 0; d <= 20; ++d) {
        const RefRule& t = triangle_quadrature(d);
        EXPECT_GE(t.exactness, d);
        for (double w : t.weights) EXPECT_GT(w, 0.);
        // int_{ref} x^a y^b = a! b! / (a + b + 2)!
        for (int a = 0; a <= d; ++a) {
            const int b = d - a;
            double exact = std::tgamma(a + 1.) * std::tgamma(b + 1.) / std::tgamma(a + b + 3.), s = 0.;
            for (std::size_t i = 0; i < t.points.size(); ++i)
                s += t.weights[i] * std::pow(t.points[i].x(), a) * std::pow(t.points[i].y(), b);
            EXPECT_NEAR(s, exact, 1e-15 + 1e-13 * exact) << "degree " << d;
        }
        const RefRule& g = segment_quadrature(d);
        double s = 0.;
        for (std::size_t i = 0; i < g.points.size(); ++i) s += g.weights[i] * std::pow(g.points[i].x(), d);
        EXPECT_NEAR(s, 1. / (d + 1.), 1e-15);
    }
}

TEST(Basis, OrthonormalAndHierarchical) {
    const PolyMesh m = gen_hexagonal(3);
    for (std::size_t c = 0; c < m.num_cells(); ++c) {
        const ScaledBasis b = cell_basis(m, c, 3);
        Eigen::MatrixXd G = Eigen::MatrixXd::Zero(10, 10);
        for (const auto& q : quad_cell(m, c, 6)) {
            const Eigen::VectorXd v = b.values(q.x);
            G += q.w * v * v.transpose();
        }
        G /= m.cell(c).area;
        EXPECT_LT((G - Eigen::MatrixXd::Identity(10, 10)).norm(), 1e-12);
        EXPECT_TRUE(b.coefficients().isLowerTriangular(1e-14));
    }
}

TEST(Projection, FixesPolynomialsAndMeans) {
    const PolyMesh m = gen_cartesian(1);
    const QuadRule r = quad_cell(m, 0, 8);
    const ScaledBasis b = cell_basis(m, 0, 2);
    const ScalarField p = [](const Point& x) { return 1. + 2. * x.x() - x.x() * x.y() + 0.5 * x.y() * x.y(); };
    const Eigen::VectorXd c = l2_project(b, p, r);
    for (const auto& q : r) EXPECT_NEAR(b.values(q.x).dot(c), p(q.x), 1e-14);
    const Eigen::VectorXd c0 = l2_project_prefix(b, 1, [](const Point& x) { return x.x(); }, r);
    EXPECT_NEAR(b.values(Point(0.3, 0.8)).head(1).dot(c0), 0.5, 1e-15);
}

TEST(Projection, MatchesNormalEquationsOracle) {
    const PolyMesh tri = build_mesh({{0.1, 0.2}, {0.9, 0.3}, {0.4, 1.1}}, {{0, 1, 2}});
    const ScalarField f = [](const Point& x) { return std::sin(x.x()); };
    const ScaledBasis b = cell_basis(tri, 0, 3);
    const Eigen::VectorXd c = l2_project(b, f, quad_cell(tri, 0, 16));
    const auto oracle = oracle::dense_projection(oracle::cell_rule(tri, 0, 32), 3, tri.cell(0).centroid, tri.cell(0).diameter, f);
    for (const auto& q : quad_cell(tri, 0, 6)) EXPECT_NEAR(b.values(q.x).dot(c), oracle(q.x), 1e-12);
}

TEST(Koszul, EmptyForLowDegrees) {
    const PolyMesh m = gen_cartesian(1);
    const ScaledBasis b = cell_basis(m, 0, 2);
    EXPECT_EQ(koszul_basis(m, 0, 0, b).size(), 0u);
    EXPECT_EQ(koszul_basis(m, 0, -1, b).size(), 0u);
}

TEST(Koszul, DegreeOneIsTheRotatedPositionVector) {
    const PolyMesh m = gen_cartesian(1);
    const ScaledBasis b = cell_basis(m, 0, 2);
    const KoszulBasis kz = koszul_basis(m, 0, 1, b);
    ASSERT_EQ(kz.size(), 1u);
    const Point apex = m.vertex(m.subtriangulation(0).apex);
    for (const Point x : {Point(0.3, 0.7), Point(0.9, 0.1)}) {
        const Point g = kz.values(x).col(0), r = x - apex;
        // in 2D, orthogonal to r means parallel to (-r_y, r_x)
        EXPECT_NEAR(g.dot(r), 0., 1e-14);
        EXPECT_GT(g.norm(), 0.1 * r.norm());
    }
}

TEST(Koszul, ComplementsGradientsInDegreeTwo) {
    // P^2(T)^2 = grad P^3(T) + (x - x_T)^perp P^1(T): rank 9 + 3 = 12
    const PolyMesh m = gen_cartesian(1);
    const ScaledBasis b = cell_basis(m, 0, 3);
    const KoszulBasis kz = koszul_basis(m, 0, 2, b);
    ASSERT_EQ(kz.size(), 3u);
    const QuadRule r = quad_cell(m, 0, 8);
    Eigen::MatrixXd S(static_cast<Eigen::Index>(2 * r.size()), 12);
    for (std::size_t i = 0; i < r.size(); ++i) {
        const Eigen::MatrixX2d g = b.gradients(r[i].x);
        const Eigen::Matrix2Xd k = kz.values(r[i].x);
        for (int j = 0; j < 9; ++j) S.block(2 * static_cast<Eigen::Index>(i), j, 2, 1) = g.row(j + 1).transpose();
        S.block(2 * static_cast<Eigen::Index>(i), 9, 2, 3) = k;
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(S);
    lu.setThreshold(1e-10);
    EXPECT_EQ(lu.rank(), 12);
}
