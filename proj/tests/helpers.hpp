#pragma once

#include <cmath>
#include <random>

#include <Eigen/Core>

#include "wgeit/mesh.hpp"

namespace test {

// Mesh holding the single triangle (0,0), (1,0), (0,1).
inline wgeit::Mesh unit_right_triangle()
{
    wgeit::Mesh m;
    m.n_subdiv = 1;
    m.h = 1.0;
    m.vertices = {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}};
    m.triangles = {{0, 1, 2}};
    m.triangle_edges = {{0, 1, 2}};
    auto edge = [&](int a, int b, wgeit::Vec2 n) {
        wgeit::Edge e;
        e.vertices = {a, b};
        e.length = (m.vertices[a] - m.vertices[b]).norm();
        e.tri = {0, -1};
        e.normal = n;
        return e;
    };
    const double s = 1.0 / std::sqrt(2.0);
    m.edges = {edge(1, 2, {s, s}), edge(2, 0, {-1.0, 0.0}), edge(0, 1, {0.0, -1.0})};
    m.areas = {0.5};
    m.boundary_edges = {0, 1, 2};
    return m;
}

inline Eigen::VectorXd uniform_vector(std::mt19937_64& rng, Eigen::Index n, double lo, double hi)
{
    std::uniform_real_distribution<double> d(lo, hi);
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i)
        v[i] = d(rng);
    return v;
}

inline Eigen::MatrixXd uniform_matrix(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c, double lo, double hi)
{
    return uniform_vector(rng, r * c, lo, hi).reshaped(r, c);
}

} // namespace test
