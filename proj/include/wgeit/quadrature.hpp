#pragma once

#include <array>
#include <span>

namespace wgeit::quadrature {

/// Barycentric point with weight normalised so the weights sum to one.
struct TrianglePoint {
    std::array<double, 3> bary;
    double weight;
};

struct LinePoint {
    double t; // in [0, 1]
    double weight;
};

/// 6-point symmetric rule, exact for polynomials of degree 4.
std::span<const TrianglePoint> triangle_degree4();
/// 12-point symmetric rule, exact for polynomials of degree 6.
std::span<const TrianglePoint> triangle_degree6();
/// 3-point Gauss-Legendre on [0, 1], exact for degree 5.
std::span<const LinePoint> gauss3();

} // namespace wgeit::quadrature
