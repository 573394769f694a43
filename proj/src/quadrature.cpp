#include "wgeit/quadrature.hpp"

#include <cmath>
#include <vector>

namespace wgeit::quadrature {

namespace {

// Symmetric Dunavant rules, expanded from their orbit representatives.
std::vector<TrianglePoint> expand(std::initializer_list<std::pair<std::array<double, 3>, double>> orbits)
{
    std::vector<TrianglePoint> pts;
    for (const auto& [b, w] : orbits) {
        if (b[0] == b[1] && b[1] == b[2]) {
            pts.push_back({b, w});
        } else if (b[0] == b[1]) {
            pts.push_back({{b[0], b[0], b[2]}, w});
            pts.push_back({{b[0], b[2], b[0]}, w});
            pts.push_back({{b[2], b[0], b[0]}, w});
        } else {
            const std::array<std::array<int, 3>, 6> perms{{{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
            for (const auto& p : perms)
                pts.push_back({{b[p[0]], b[p[1]], b[p[2]]}, w});
        }
    }
    return pts;
}

} // namespace

std::span<const TrianglePoint> triangle_degree4()
{
    static const std::vector<TrianglePoint> pts = expand({
        {{0.445948490915965, 0.445948490915965, 0.108103018168070}, 0.223381589678011},
        {{0.091576213509771, 0.091576213509771, 0.816847572980459}, 0.109951743655322},
    });
    return pts;
}

std::span<const TrianglePoint> triangle_degree6()
{
    static const std::vector<TrianglePoint> pts = expand({
        {{0.249286745170910, 0.249286745170910, 0.501426509658179}, 0.116786275726379},
        {{0.063089014491502, 0.063089014491502, 0.873821971016996}, 0.050844906370207},
        {{0.053145049844817, 0.310352451033784, 0.636502499121399}, 0.082851075618374},
    });
    return pts;
}

std::span<const LinePoint> gauss3()
{
    static const std::array<LinePoint, 3> pts{{
        {0.5 - 0.5 * std::sqrt(0.6), 5.0 / 18.0},
        {0.5, 8.0 / 18.0},
        {0.5 + 0.5 * std::sqrt(0.6), 5.0 / 18.0},
    }};
    return pts;
}

} // namespace wgeit::quadrature
