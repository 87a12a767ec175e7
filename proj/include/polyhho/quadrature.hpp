#pragma once

#include <vector>

#include "polyhho/mesh.hpp"

namespace polyhho {

struct QuadNode {
    Point x = Point::Zero();
    double w = 0.;
};
using QuadRule = std::vector<QuadNode>;

/// Reference rule: points in reference coordinates, positive weights summing to the
/// reference measure (1 on [0,1], 1/2 on the unit triangle).
struct RefRule {
    std::vector<Point> points;  ///< segment rules use the x coordinate only
    std::vector<double> weights;
    int exactness = 0;
};

/// Gauss-Legendre on [0,1] exact up to `degree`. Cached.
const RefRule& segment_quadrature(int degree);
/// Collapsed Gauss rule on the unit triangle (0,0),(1,0),(0,1) exact up to `degree`. Cached.
const RefRule& triangle_quadrature(int degree);

QuadRule quad_segment(const Point& a, const Point& b, int degree);
QuadRule quad_triangle(const Point& a, const Point& b, const Point& c, int degree);
/// Rule on one simplex of the cell subtriangulation.
QuadRule quad_simplex(const PolyMesh& mesh, std::size_t cell, std::size_t simplex, int degree);
/// Rule on a cell, obtained by summing over its subtriangulation.
QuadRule quad_cell(const PolyMesh& mesh, std::size_t cell, int degree);
QuadRule quad_face(const PolyMesh& mesh, std::size_t face, int degree);

}  // namespace polyhho
