#include <cmath>
#include <filesystem>

#include <gtest/gtest.h>

#include "polyhho/mesh.hpp"

using namespace polyhho;

namespace {

std::vector<Point> unit_square_points() { return {{0., 0.}, {1., 0.}, {1., 1.}, {0., 1.}}; }

}  // namespace

TEST(Mesh, TwoByTwoGridHasTwelveFaces) {
    std::vector<Point> v;
    for (int j = 0; j <= 2; ++j)
        for (int i = 0; i <= 2; ++i) v.emplace_back(0.5 * i, 0.5 * j);
    std::vector<std::vector<std::size_t>> loops;
    for (std::size_t j = 0; j < 2; ++j)
        for (std::size_t i = 0; i < 2; ++i) {
            const std::size_t a = 3 * j + i;
            loops.push_back({a, a + 1, a + 4, a + 3});
        }
    const PolyMesh m = build_mesh(v, loops);
    EXPECT_EQ(m.num_cells(), 4u);
    EXPECT_EQ(m.num_faces(), 12u);
    EXPECT_EQ(m.num_boundary_faces(), 8u);
    EXPECT_NEAR(m.total_area(), 1., 1e-15);
}

TEST(Mesh, SingleTriangleHasThreeBoundaryFaces) {
    const PolyMesh m = build_mesh({{0., 0.}, {1., 0.}, {0., 1.}}, {{0, 1, 2}});
    EXPECT_EQ(m.num_cells(), 1u);
    EXPECT_EQ(m.num_faces(), 3u);
    EXPECT_EQ(m.num_boundary_faces(), 3u);
}

TEST(Mesh, RepeatedVertexIsRejected) {
    EXPECT_THROW(build_mesh(unit_square_points(), {{0, 1, 1, 2, 3}}), MeshError);
}

TEST(Mesh, ClockwiseLoopIsRejected) {
    EXPECT_THROW(build_mesh(unit_square_points(), {{0, 3, 2, 1}}), MeshError);
}

TEST(Mesh, OutwardNormalsIntegrateToZero) {
    const PolyMesh m = gen_hexagonal(4);
    for (std::size_t c = 0; c < m.num_cells(); ++c) {
        Point s = Point::Zero();
        for (std::size_t i = 0; i < m.cell(c).faces.size(); ++i)
            s += m.face(m.cell(c).faces[i]).length * m.outward_normal(c, i);
        EXPECT_LT(s.norm(), 1e-14);
    }
}

TEST(Subtriangulation, SquareGivesTwoTrianglesAtFirstVertex) {
    const SubTriangulation st = subtriangulate(unit_square_points(), {0, 1, 2, 3});
    ASSERT_EQ(st.simplices.size(), 2u);
    EXPECT_EQ(st.apex, 0u);
    EXPECT_EQ(st.interior_edges.size(), 1u);
    for (const auto& s : st.simplices) EXPECT_NEAR(s.area, 0.5, 1e-15);
}

TEST(Subtriangulation, RegularHexagonGivesFourTriangles) {
    std::vector<Point> v;
    std::vector<std::size_t> loop;
    for (int i = 0; i < 6; ++i) {
        const double a = std::acos(-1.) * i / 3.;
        v.emplace_back(std::cos(a), std::sin(a));
        loop.push_back(static_cast<std::size_t>(i));
    }
    const SubTriangulation st = subtriangulate(v, loop);
    EXPECT_EQ(st.simplices.size(), 4u);
    EXPECT_EQ(st.interior_edges.size(), 3u);
}

TEST(Subtriangulation, TriangleIsItself) {
    const SubTriangulation st = subtriangulate({{0., 0.}, {1., 0.}, {0., 1.}}, {0, 1, 2});
    EXPECT_EQ(st.simplices.size(), 1u);
    EXPECT_TRUE(st.interior_edges.empty());
}

TEST(Subtriangulation, IsDeterministic) {
    const PolyMesh a = gen_kershaw(6), b = gen_kershaw(6);
    for (std::size_t c = 0; c < a.num_cells(); ++c) {
        const auto& sa = a.subtriangulation(c).simplices;
        const auto& sb = b.subtriangulation(c).simplices;
        ASSERT_EQ(sa.size(), sb.size());
        for (std::size_t t = 0; t < sa.size(); ++t) EXPECT_EQ(sa[t].vertices, sb[t].vertices);
    }
}

TEST(Generators, CartesianFourByFour) {
    const PolyMesh m = gen_cartesian(4);
    EXPECT_EQ(m.num_cells(), 16u);
    for (const Cell& c : m.cells()) EXPECT_NEAR(c.diameter, std::sqrt(2.) / 4., 1e-15);
    EXPECT_NEAR(m.meshsize(), std::sqrt(2.) / 4., 1e-15);
}

TEST(Generators, UndistortedKershawIsCartesian) {
    const PolyMesh a = gen_kershaw(5, 0.), b = gen_cartesian(5);
    ASSERT_EQ(a.num_vertices(), b.num_vertices());
    ASSERT_EQ(a.num_cells(), b.num_cells());
    for (std::size_t i = 0; i < a.num_vertices(); ++i) EXPECT_LT((a.vertex(i) - b.vertex(i)).norm(), 1e-15);
    for (std::size_t c = 0; c < a.num_cells(); ++c) EXPECT_EQ(a.cell(c).vertices, b.cell(c).vertices);
}

TEST(Generators, HexagonalInteriorCellsAreHexagons) {
    const PolyMesh m = gen_hexagonal(6);
    EXPECT_NEAR(m.total_area(), 1., 1e-13);
    std::size_t interior = 0;
    for (std::size_t c = 0; c < m.num_cells(); ++c) {
        bool touches = false;
        for (std::size_t f : m.cell(c).faces) touches = touches || m.face(f).is_boundary();
        if (!touches) {
            ++interior;
            EXPECT_EQ(m.cell(c).vertices.size(), 6u);
        }
    }
    EXPECT_GT(interior, 0u);
    EXPECT_GT(regularity_report(m).min_shape_ratio, 0.);
}

TEST(Generators, FamiliesCoverTheUnitSquare) {
    for (MeshFamily f : {MeshFamily::cartesian, MeshFamily::hexagonal, MeshFamily::kershaw}) {
        const PolyMesh m = generate(f, 8);
        EXPECT_NEAR(m.total_area(), 1., 1e-13) << family_name(f);
        EXPECT_EQ(parse_family(family_name(f)), f);
    }
    EXPECT_THROW(parse_family("voronoi"), MeshError);
}

TEST(Regularity, CartesianFan) {
    for (std::size_t n : {2u, 4u, 8u}) {
        const RegularityReport r = regularity_report(gen_cartesian(n));
        EXPECT_EQ(r.max_submesh_cells, 2u);
        EXPECT_EQ(r.max_cell_faces, 4u);
    }
}

TEST(Regularity, HexagonalAtMostSixFaces) {
    for (std::size_t n : {2u, 4u, 8u}) EXPECT_LE(regularity_report(gen_hexagonal(n)).max_cell_faces, 6u);
}

TEST(Regularity, KershawShapeRatioPositiveAndLevelIndependent) {
    const double r8 = regularity_report(gen_kershaw(8, 0.3)).min_shape_ratio;
    const double r16 = regularity_report(gen_kershaw(16, 0.3)).min_shape_ratio;
    EXPECT_GT(r8, 0.);
    EXPECT_NEAR(r8, r16, 0.1 * r8);
}

TEST(MeshIO, RoundTrip) {
    const PolyMesh m = gen_kershaw(3);
    const PolyMesh r = read_mesh_string(write_mesh_string(m));
    ASSERT_EQ(r.num_vertices(), m.num_vertices());
    ASSERT_EQ(r.num_cells(), m.num_cells());
    for (std::size_t i = 0; i < m.num_vertices(); ++i) EXPECT_EQ(r.vertex(i), m.vertex(i));
    for (std::size_t c = 0; c < m.num_cells(); ++c) EXPECT_EQ(r.cell(c).vertices, m.cell(c).vertices);

    const auto path = std::filesystem::temp_directory_path() / "polyhho_roundtrip.mesh";
    save_mesh(gen_cartesian(2), path.string());
    const PolyMesh f = load_mesh(path.string());
    EXPECT_EQ(f.num_cells(), 4u);
    EXPECT_EQ(f.num_faces(), 12u);
    std::filesystem::remove(path);
}

TEST(MeshIO, HeaderAndComments) {
    const std::string text =
        "polymesh 1 2\n# unit square\nV 4\n0 0\n1 0\n1 1\n0 1\nC 1\n4 0 1 2 3  # one cell\n";
    const PolyMesh m = read_mesh_string(text);
    EXPECT_EQ(m.num_cells(), 1u);
    EXPECT_THROW(read_mesh_string("polymesh 2 2\nV 0\nC 0\n"), MeshError);
}

TEST(MeshIO, OutOfRangeVertexIsRejected) {
    std::string text = "polymesh 1 2\nV 9\n";
    for (int j = 0; j < 3; ++j)
        for (int i = 0; i < 3; ++i) text += std::to_string(0.5 * i) + " " + std::to_string(0.5 * j) + "\n";
    text += "C 1\n4 0 1 999 3\n";
    EXPECT_THROW(read_mesh_string(text), MeshError);
}

TEST(MeshIO, EmptyCellListIsRejected) {
    EXPECT_THROW(read_mesh_string("polymesh 1 2\nV 3\n0 0\n1 0\n0 1\nC 0\n"), MeshError);
}
