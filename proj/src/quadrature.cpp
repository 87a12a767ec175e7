#include "polyhho/quadrature.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>

namespace polyhho {

namespace {

// n-point Gauss-Legendre nodes/weights on [-1,1] by Newton iteration on P_n.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    x.assign(n, 0.);
    w.assign(n, 0.);
    const double pi = std::acos(-1.);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(pi * (i + 0.75) / (n + 0.5));
        double dp = 0.;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1., p1 = z;
            for (int j = 2; j <= n; ++j) {
                const double p2 = ((2. * j - 1.) * z * p1 - (j - 1.) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) p0 = 1.;
            dp = n * (z * p1 - p0) / (z * z - 1.);
            const double dz = p1 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        double p0 = 1., p1 = z;
        for (int j = 2; j <= n; ++j) {
            const double p2 = ((2. * j - 1.) * z * p1 - (j - 1.) * p0) / j;
            p0 = p1;
            p1 = p2;
        }
        if (n == 1) p0 = 1.;
        dp = n * (z * p1 - p0) / (z * z - 1.);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = w[n - 1 - i] = 2. / ((1. - z * z) * dp * dp);
    }
}

std::mutex cache_mutex;

}  // namespace

const RefRule& segment_quadrature(int degree) {
    if (degree < 0) degree = 0;
    static std::map<int, std::unique_ptr<RefRule>> cache;
    std::lock_guard<std::mutex> lock(cache_mutex);
    auto& slot = cache[degree];
    if (!slot) {
        const int n = degree / 2 + 1;
        std::vector<double> x, w;
        gauss_legendre(n, x, w);
        slot = std::make_unique<RefRule>();
        slot->exactness = 2 * n - 1;
        for (int i = 0; i < n; ++i) {
            slot->points.emplace_back(0.5 * (x[i] + 1.), 0.);
            slot->weights.push_back(0.5 * w[i]);
        }
    }
    return *slot;
}

// Conical product: x = s, y = t (1 - s); the Jacobian (1 - s) adds one degree in s.
const RefRule& triangle_quadrature(int degree) {
    if (degree < 0) degree = 0;
    static std::map<int, std::unique_ptr<RefRule>> cache;
    std::lock_guard<std::mutex> lock(cache_mutex);
    auto& slot = cache[degree];
    if (!slot) {
        const int ns = (degree + 2) / 2 + (degree + 2) % 2;
        const int nt = (degree + 1) / 2 + (degree + 1) % 2;
        std::vector<double> xs, ws, xt, wt;
        gauss_legendre(ns, xs, ws);
        gauss_legendre(nt, xt, wt);
        slot = std::make_unique<RefRule>();
        slot->exactness = degree;
        for (int i = 0; i < ns; ++i) {
            const double s = 0.5 * (xs[i] + 1.);
            for (int j = 0; j < nt; ++j) {
                const double t = 0.5 * (xt[j] + 1.);
                slot->points.emplace_back(s, t * (1. - s));
                slot->weights.push_back(0.25 * ws[i] * wt[j] * (1. - s));
            }
        }
    }
    return *slot;
}

QuadRule quad_segment(const Point& a, const Point& b, int degree) {
    const RefRule& ref = segment_quadrature(degree);
    const double len = (b - a).norm();
    QuadRule rule(ref.weights.size());
    for (std::size_t i = 0; i < rule.size(); ++i) {
        rule[i].x = a + ref.points[i].x() * (b - a);
        rule[i].w = ref.weights[i] * len;
    }
    return rule;
}

QuadRule quad_triangle(const Point& a, const Point& b, const Point& c, int degree) {
    const RefRule& ref = triangle_quadrature(degree);
    const Point e1 = b - a, e2 = c - a;
    const double jac = std::abs(e1.x() * e2.y() - e1.y() * e2.x());
    QuadRule rule(ref.weights.size());
    for (std::size_t i = 0; i < rule.size(); ++i) {
        rule[i].x = a + ref.points[i].x() * e1 + ref.points[i].y() * e2;
        rule[i].w = ref.weights[i] * jac;
    }
    return rule;
}

QuadRule quad_simplex(const PolyMesh& mesh, std::size_t cell, std::size_t simplex, int degree) {
    const auto& s = mesh.subtriangulation(cell).simplices[simplex];
    return quad_triangle(mesh.vertex(s.vertices[0]), mesh.vertex(s.vertices[1]), mesh.vertex(s.vertices[2]), degree);
}

QuadRule quad_cell(const PolyMesh& mesh, std::size_t cell, int degree) {
    QuadRule rule;
    const auto& st = mesh.subtriangulation(cell);
    for (std::size_t t = 0; t < st.simplices.size(); ++t) {
        auto part = quad_simplex(mesh, cell, t, degree);
        rule.insert(rule.end(), part.begin(), part.end());
    }
    return rule;
}

QuadRule quad_face(const PolyMesh& mesh, std::size_t face, int degree) {
    const Face& F = mesh.face(face);
    return quad_segment(mesh.vertex(F.v0), mesh.vertex(F.v1), degree);
}

}  // namespace polyhho
