#include "polyhho/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

namespace polyhho {

namespace {

double cross(const Point& a, const Point& b) { return a.x() * b.y() - a.y() * b.x(); }

double triangle_area(const Point& a, const Point& b, const Point& c) { return 0.5 * cross(b - a, c - a); }

double loop_diameter(const std::vector<Point>& pts) {
    double d = 0.;
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j) d = std::max(d, (pts[i] - pts[j]).norm());
    return d;
}

bool segments_cross(const Point& a, const Point& b, const Point& c, const Point& d) {
    const double d1 = cross(b - a, c - a), d2 = cross(b - a, d - a);
    const double d3 = cross(d - c, a - c), d4 = cross(d - c, b - c);
    return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
}

}  // namespace

double signed_area(const std::vector<Point>& vertices, const std::vector<std::size_t>& loop) {
    double a = 0.;
    for (std::size_t i = 0; i < loop.size(); ++i)
        a += cross(vertices[loop[i]], vertices[loop[(i + 1) % loop.size()]]);
    return 0.5 * a;
}

SubTriangulation subtriangulate(const std::vector<Point>& vertices, const std::vector<std::size_t>& loop,
                                std::size_t cell_id) {
    const std::size_t n = loop.size();
    if (n < 3) throw MeshError("cell " + std::to_string(cell_id) + ": fewer than 3 vertices");
    std::vector<Point> pts;
    for (auto v : loop) pts.push_back(vertices[v]);
    const double diam = loop_diameter(pts);
    const double tol = 1e-12 * diam * diam;

    std::size_t apex = n;
    for (std::size_t a = 0; a < n && apex == n; ++a) {
        bool ok = true;
        for (std::size_t j = 1; j + 1 < n && ok; ++j)
            ok = triangle_area(pts[a], pts[(a + j) % n], pts[(a + j + 1) % n]) > tol;
        if (ok) apex = a;
    }
    if (apex == n)
        throw MeshError("cell " + std::to_string(cell_id) + ": no common-vertex triangulation exists");

    SubTriangulation st;
    st.cell = cell_id;
    st.apex_local = apex;
    st.apex = loop[apex];
    st.face_simplex.assign(n, 0);
    const std::size_t ns = n - 2;
    auto at = [&](std::size_t j) { return (apex + j) % n; };  // loop position j steps after the apex

    for (std::size_t t = 0; t < ns; ++t) {
        SubTriangulation::Simplex s;
        s.vertices = {loop[apex], loop[at(t + 1)], loop[at(t + 2)]};
        const Point &a = vertices[s.vertices[0]], &b = vertices[s.vertices[1]], &c = vertices[s.vertices[2]];
        s.area = triangle_area(a, b, c);
        s.centroid = (a + b + c) / 3.;
        s.diameter = std::max({(a - b).norm(), (b - c).norm(), (c - a).norm()});
        st.simplices.push_back(s);
    }
    // interior edge m joins the apex and loop position at(m + 2), shared by simplices m and m + 1
    for (std::size_t m = 0; m + 1 < ns; ++m) {
        SubTriangulation::InteriorEdge e;
        const std::size_t other = loop[at(m + 2)];
        e.v0 = std::min(st.apex, other);
        e.v1 = std::max(st.apex, other);
        const Point d = vertices[e.v1] - vertices[e.v0];
        e.length = d.norm();
        e.tangent = d / e.length;
        e.normal = Point(e.tangent.y(), -e.tangent.x());
        e.midpoint = 0.5 * (vertices[e.v0] + vertices[e.v1]);
        if ((st.simplices[m].centroid - e.midpoint).dot(e.normal) < 0.) {
            e.first = m;
            e.second = m + 1;
        } else {
            e.first = m + 1;
            e.second = m;
        }
        st.interior_edges.push_back(e);
    }
    st.simplex_edges.resize(ns);
    for (std::size_t t = 0; t < ns; ++t) {
        auto& se = st.simplex_edges[t];
        se[0] = {true, at(t + 1)};
        st.face_simplex[at(t + 1)] = t;
        if (t + 1 == ns) {
            se[1] = {true, at(n - 1)};
            st.face_simplex[at(n - 1)] = t;
        } else {
            se[1] = {false, t};
        }
        if (t == 0) {
            se[2] = {true, apex};
            st.face_simplex[apex] = t;
        } else {
            se[2] = {false, t - 1};
        }
    }
    return st;
}

PolyMesh build_mesh(std::vector<Point> vertices, std::vector<std::vector<std::size_t>> loops) {
    if (loops.empty()) throw MeshError("mesh has no cells");
    PolyMesh mesh;
    mesh.vertices_ = std::move(vertices);
    const auto& V = mesh.vertices_;
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> edge_index;

    for (std::size_t c = 0; c < loops.size(); ++c) {
        const auto& loop = loops[c];
        const std::string tag = "cell " + std::to_string(c);
        if (loop.size() < 3) throw MeshError(tag + ": degenerate cell (fewer than 3 vertices)");
        for (auto v : loop)
            if (v >= V.size()) throw MeshError(tag + ": vertex index " + std::to_string(v) + " out of range");
        auto sorted = loop;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw MeshError(tag + ": degenerate cell (repeated vertex)");

        Cell T;
        T.vertices = loop;
        std::vector<Point> pts;
        for (auto v : loop) pts.push_back(V[v]);
        T.diameter = loop_diameter(pts);
        T.area = signed_area(V, loop);
        if (!(T.area > 1e-14 * T.diameter * T.diameter)) {
            if (T.area < -1e-14 * T.diameter * T.diameter) throw MeshError(tag + ": vertex loop is not counter-clockwise");
            throw MeshError(tag + ": degenerate cell (zero area)");
        }
        const std::size_t n = loop.size();
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 2; j < n; ++j) {
                if (i == 0 && j == n - 1) continue;
                if (segments_cross(pts[i], pts[(i + 1) % n], pts[j], pts[(j + 1) % n]))
                    throw MeshError(tag + ": cell is not a simple polygon");
            }
        Point cen = Point::Zero();
        for (std::size_t i = 0; i < n; ++i) {
            const Point &a = pts[i], &b = pts[(i + 1) % n];
            cen += cross(a, b) * (a + b);
        }
        T.centroid = cen / (6. * T.area);

        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t a = loop[i], b = loop[(i + 1) % n];
            const auto key = std::minmax(a, b);
            auto it = edge_index.find(key);
            if (it == edge_index.end()) {
                Face F;
                F.v0 = key.first;
                F.v1 = key.second;
                const Point d = V[F.v1] - V[F.v0];
                F.length = d.norm();
                F.tangent = d / F.length;
                F.normal = Point(F.tangent.y(), -F.tangent.x());
                F.midpoint = 0.5 * (V[F.v0] + V[F.v1]);
                F.left = a < b ? c : kNoCell;
                F.right = a < b ? kNoCell : c;
                edge_index.emplace(key, mesh.faces_.size());
                T.faces.push_back(mesh.faces_.size());
                mesh.faces_.push_back(F);
            } else {
                Face& F = mesh.faces_[it->second];
                std::size_t& slot = a < b ? F.left : F.right;
                if (slot != kNoCell) throw MeshError(tag + ": non-manifold or inconsistently oriented edge");
                slot = c;
                T.faces.push_back(it->second);
            }
            T.face_orientation.push_back(a < b ? 1 : -1);
        }
        mesh.cells_.push_back(std::move(T));
    }
    // boundary faces keep their single cell in `left`
    for (auto& F : mesh.faces_)
        if (F.left == kNoCell) std::swap(F.left, F.right);
    for (std::size_t c = 0; c < mesh.cells_.size(); ++c) {
        Cell& T = mesh.cells_[c];
        for (std::size_t i = 0; i < T.faces.size(); ++i) {
            const Face& F = mesh.faces_[T.faces[i]];
            const std::size_t a = T.vertices[i];
            T.face_orientation[i] = (F.v0 == a) ? 1 : -1;
        }
    }
    for (std::size_t c = 0; c < mesh.cells_.size(); ++c)
        mesh.subtri_.push_back(subtriangulate(mesh.vertices_, mesh.cells_[c].vertices, c));
    return mesh;
}

std::size_t PolyMesh::num_boundary_faces() const {
    return static_cast<std::size_t>(std::count_if(faces_.begin(), faces_.end(), [](const Face& F) { return F.is_boundary(); }));
}

double PolyMesh::meshsize() const {
    double h = 0.;
    for (const auto& T : cells_) h = std::max(h, T.diameter);
    return h;
}

double PolyMesh::total_area() const {
    double a = 0.;
    for (const auto& T : cells_) a += T.area;
    return a;
}

std::size_t PolyMesh::locate(const Point& p, double tol) const {
    for (std::size_t c = 0; c < cells_.size(); ++c) {
        for (const auto& s : subtri_[c].simplices) {
            const Point &a = vertices_[s.vertices[0]], &b = vertices_[s.vertices[1]], &d = vertices_[s.vertices[2]];
            const double scale = tol * s.diameter * s.diameter;
            if (triangle_area(a, b, p) >= -scale && triangle_area(b, d, p) >= -scale && triangle_area(d, a, p) >= -scale)
                return c;
        }
    }
    return kNoCell;
}

RegularityReport regularity_report(const PolyMesh& mesh) {
    RegularityReport r;
    r.min_shape_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
        const auto& st = mesh.subtriangulation(c);
        r.max_submesh_cells = std::max(r.max_submesh_cells, st.simplices.size());
        r.max_cell_faces = std::max(r.max_cell_faces, mesh.cell(c).faces.size());
        for (const auto& s : st.simplices) {
            const Point &a = mesh.vertex(s.vertices[0]), &b = mesh.vertex(s.vertices[1]), &d = mesh.vertex(s.vertices[2]);
            const double perimeter = (a - b).norm() + (b - d).norm() + (d - a).norm();
            const double inradius = 2. * s.area / perimeter;
            r.min_shape_ratio = std::min(r.min_shape_ratio, inradius / s.diameter);
        }
    }
    return r;
}

}  // namespace polyhho
