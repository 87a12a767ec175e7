#pragma once

#include <array>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace polyhho {

using Point = Eigen::Vector2d;

class MeshError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kNoCell = std::numeric_limits<std::size_t>::max();

/// A mesh edge, stored once with the global orientation v0 < v1.
struct Face {
    std::size_t v0 = 0;
    std::size_t v1 = 0;
    std::size_t left = kNoCell;   ///< first incident cell
    std::size_t right = kNoCell;  ///< second incident cell, or kNoCell on the boundary
    Point midpoint = Point::Zero();
    Point normal = Point::Zero();   ///< unit, rotated clockwise from v0 -> v1
    Point tangent = Point::Zero();  ///< unit, v0 -> v1
    double length = 0.;

    bool is_boundary() const { return right == kNoCell; }
};

/// Matching simplicial submesh of one cell. All simplices share `apex`.
struct SubTriangulation {
    struct Simplex {
        std::array<std::size_t, 3> vertices{};  ///< global vertex ids, CCW
        double area = 0.;
        double diameter = 0.;
        Point centroid = Point::Zero();
    };
    /// Interior subface with fixed orientation: normal points out of `first`.
    struct InteriorEdge {
        std::size_t v0 = 0;  ///< global vertex ids, v0 < v1
        std::size_t v1 = 0;
        std::size_t first = 0;   ///< simplex index (local)
        std::size_t second = 0;
        Point normal = Point::Zero();
        Point tangent = Point::Zero();
        Point midpoint = Point::Zero();
        double length = 0.;
    };
    /// Edge of a simplex, referencing either a cell face or an interior subface.
    struct SimplexEdge {
        bool boundary = true;
        std::size_t index = 0;  ///< local face position in the cell loop, or interior edge id
    };

    std::size_t cell = 0;
    std::size_t apex = 0;        ///< global vertex id of the common vertex
    std::size_t apex_local = 0;  ///< position of the apex in the cell loop
    std::vector<Simplex> simplices;
    std::vector<InteriorEdge> interior_edges;
    std::vector<std::array<SimplexEdge, 3>> simplex_edges;  ///< edge i is opposite vertex i
    std::vector<std::size_t> face_simplex;  ///< per cell face (loop position) the simplex containing it
};

struct Cell {
    std::vector<std::size_t> vertices;  ///< CCW loop
    std::vector<std::size_t> faces;     ///< faces[i] joins vertices[i] and vertices[i+1]
    std::vector<int> face_orientation;  ///< +1 when the global face normal is outward
    Point centroid = Point::Zero();
    double area = 0.;
    double diameter = 0.;
};

/// Polygonal mesh with deduplicated faces and a per-cell subtriangulation.
/// Immutable after construction.
class PolyMesh {
public:
    PolyMesh() = default;

    std::size_t num_vertices() const { return vertices_.size(); }
    std::size_t num_cells() const { return cells_.size(); }
    std::size_t num_faces() const { return faces_.size(); }
    std::size_t num_boundary_faces() const;
    std::size_t num_interior_faces() const { return num_faces() - num_boundary_faces(); }

    const std::vector<Point>& vertices() const { return vertices_; }
    const Point& vertex(std::size_t i) const { return vertices_[i]; }
    const std::vector<Cell>& cells() const { return cells_; }
    const Cell& cell(std::size_t i) const { return cells_[i]; }
    const std::vector<Face>& faces() const { return faces_; }
    const Face& face(std::size_t i) const { return faces_[i]; }
    const SubTriangulation& subtriangulation(std::size_t cell) const { return subtri_[cell]; }

    /// Outward unit normal of face `local_face` of cell `c`.
    Point outward_normal(std::size_t c, std::size_t local_face) const {
        const Cell& T = cells_[c];
        return static_cast<double>(T.face_orientation[local_face]) * faces_[T.faces[local_face]].normal;
    }

    double meshsize() const;
    double total_area() const;

    /// Index of a cell containing p (boundary points resolved to the first hit), or kNoCell.
    std::size_t locate(const Point& p, double tol = 1e-12) const;

    friend PolyMesh build_mesh(std::vector<Point> vertices, std::vector<std::vector<std::size_t>> loops);

private:
    std::vector<Point> vertices_;
    std::vector<Cell> cells_;
    std::vector<Face> faces_;
    std::vector<SubTriangulation> subtri_;
};

/// Builds faces, orientations, diameters and subtriangulations.
/// Throws MeshError on degenerate, clockwise or non-manifold input.
PolyMesh build_mesh(std::vector<Point> vertices, std::vector<std::vector<std::size_t>> loops);

/// Fan triangulation of a polygon from the first loop vertex that sees every edge.
/// Throws MeshError when no vertex of the polygon is a valid common vertex.
SubTriangulation subtriangulate(const std::vector<Point>& vertices, const std::vector<std::size_t>& loop,
                                std::size_t cell_id = 0);

double signed_area(const std::vector<Point>& vertices, const std::vector<std::size_t>& loop);

// Generators on the unit square.
PolyMesh gen_cartesian(std::size_t n);
PolyMesh gen_hexagonal(std::size_t n);
PolyMesh gen_kershaw(std::size_t n, double distortion = 0.3);

/// Affine map of a mesh on (0,1)^2 onto [x0,x1] x [y0,y1].
PolyMesh rescale(const PolyMesh& mesh, double x0, double x1, double y0, double y1);

enum class MeshFamily { cartesian, hexagonal, kershaw };
MeshFamily parse_family(const std::string& name);
std::string family_name(MeshFamily f);
PolyMesh generate(MeshFamily family, std::size_t n);

struct RegularityReport {
    std::size_t max_submesh_cells = 0;
    std::size_t max_cell_faces = 0;
    double min_shape_ratio = 0.;  ///< min over simplices of inradius / diameter
};
RegularityReport regularity_report(const PolyMesh& mesh);

void save_mesh(const PolyMesh& mesh, const std::string& path);
PolyMesh load_mesh(const std::string& path);
std::string write_mesh_string(const PolyMesh& mesh);
PolyMesh read_mesh_string(const std::string& text);

}  // namespace polyhho
