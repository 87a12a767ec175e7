#include <cmath>

#include "polyhho/mesh.hpp"

namespace polyhho {

PolyMesh gen_cartesian(std::size_t n) { return gen_kershaw(n, 0.); }

// Layered z-shaped distortion of a Cartesian grid: every horizontal grid line is
// flat, tilted, then flat again across the domain.  The vertical spacing between
// neighbouring lines stays >= (1 - distortion) / n, so cells remain convex.
PolyMesh gen_kershaw(std::size_t n, double distortion) {
    if (n < 1) throw MeshError("mesh generator needs n >= 1");
    if (!(distortion >= 0. && distortion < 1.)) throw MeshError("kershaw distortion must lie in [0, 1)");
    auto profile = [](double x) {
        if (x <= 0.25) return -1.;
        if (x >= 0.75) return 1.;
        return 4. * (x - 0.5);
    };
    std::vector<Point> V;
    V.reserve((n + 1) * (n + 1));
    const double dn = static_cast<double>(n);
    for (std::size_t j = 0; j <= n; ++j)
        for (std::size_t i = 0; i <= n; ++i) {
            const double x = static_cast<double>(i) / dn, y = static_cast<double>(j) / dn;
            V.emplace_back(x, y + distortion * y * (1. - y) * profile(x));
        }
    auto id = [n](std::size_t i, std::size_t j) { return j * (n + 1) + i; };
    std::vector<std::vector<std::size_t>> loops;
    loops.reserve(n * n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) loops.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)});
    return build_mesh(std::move(V), std::move(loops));
}

// Brick-pattern honeycomb: n rows of hexagons spanning two vertex columns each,
// consecutive rows offset by one column (half cells close the odd rows).  Interior
// vertices are shifted vertically by +-delta so every cell away from the top and
// bottom walls is a strictly convex hexagon.
PolyMesh gen_hexagonal(std::size_t n) {
    if (n < 1) throw MeshError("mesh generator needs n >= 1");
    const double delta = 1. / 6.;
    const std::size_t cols = 2 * n + 1;
    const double dn = static_cast<double>(n);
    std::vector<Point> V;
    V.reserve(cols * (n + 1));
    for (std::size_t j = 0; j <= n; ++j)
        for (std::size_t i = 0; i < cols; ++i) {
            double y = static_cast<double>(j) / dn;
            if (j > 0 && j < n) y += ((i + j) % 2 == 0 ? delta : -delta) / dn;
            V.emplace_back(static_cast<double>(i) / static_cast<double>(2 * n), y);
        }
    auto id = [cols](std::size_t i, std::size_t j) { return j * cols + i; };
    std::vector<std::vector<std::size_t>> loops;
    for (std::size_t j = 0; j < n; ++j) {
        if (j % 2 == 0) {
            for (std::size_t c = 0; c + 2 < cols; c += 2)
                loops.push_back({id(c, j), id(c + 1, j), id(c + 2, j), id(c + 2, j + 1), id(c + 1, j + 1), id(c, j + 1)});
        } else {
            loops.push_back({id(0, j), id(1, j), id(1, j + 1), id(0, j + 1)});
            for (std::size_t c = 1; c + 3 < cols; c += 2)
                loops.push_back({id(c, j), id(c + 1, j), id(c + 2, j), id(c + 2, j + 1), id(c + 1, j + 1), id(c, j + 1)});
            loops.push_back({id(cols - 2, j), id(cols - 1, j), id(cols - 1, j + 1), id(cols - 2, j + 1)});
        }
    }
    return build_mesh(std::move(V), std::move(loops));
}

PolyMesh rescale(const PolyMesh& mesh, double x0, double x1, double y0, double y1) {
    std::vector<Point> V;
    V.reserve(mesh.num_vertices());
    for (const auto& p : mesh.vertices()) V.emplace_back(x0 + (x1 - x0) * p.x(), y0 + (y1 - y0) * p.y());
    std::vector<std::vector<std::size_t>> loops;
    for (const auto& T : mesh.cells()) loops.push_back(T.vertices);
    return build_mesh(std::move(V), std::move(loops));
}

MeshFamily parse_family(const std::string& name) {
    if (name == "cartesian") return MeshFamily::cartesian;
    if (name == "hexagonal") return MeshFamily::hexagonal;
    if (name == "kershaw") return MeshFamily::kershaw;
    throw MeshError("unknown mesh family '" + name + "'");
}

std::string family_name(MeshFamily f) {
    switch (f) {
        case MeshFamily::cartesian: return "cartesian";
        case MeshFamily::hexagonal: return "hexagonal";
        case MeshFamily::kershaw: return "kershaw";
    }
    return "unknown";
}

PolyMesh generate(MeshFamily family, std::size_t n) {
    switch (family) {
        case MeshFamily::cartesian: return gen_cartesian(n);
        case MeshFamily::hexagonal: return gen_hexagonal(n);
        case MeshFamily::kershaw: return gen_kershaw(n);
    }
    throw MeshError("unknown mesh family");
}

}  // namespace polyhho
