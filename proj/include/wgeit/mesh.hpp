#pragma once

#include <array>
#include <iosfwd>
#include <vector>

#include <Eigen/Core>

namespace wgeit {

using Vec2 = Eigen::Vector2d;

struct Edge {
    std::array<int, 2> vertices;
    double length = 0.0;
    // tri[1] == -1 for boundary edges.
    std::array<int, 2> tri{-1, -1};
    // Unit normal pointing out of tri[0]; tri[1] sees the opposite sign.
    Vec2 normal = Vec2::Zero();

    bool is_boundary() const { return tri[1] < 0; }
};

/// Uniform triangulation of the unit square.
///
/// Cells are numbered row-major from the bottom-left corner; each cell is cut
/// by its lower-left to upper-right diagonal into a lower triangle
/// (index 2*cell) and an upper triangle (index 2*cell + 1). Local edge k of a
/// triangle is the edge opposite its local vertex k.
class Mesh {
public:
    int n_subdiv = 0;
    double h = 0.0;
    std::vector<Vec2> vertices;
    std::vector<std::array<int, 3>> triangles;
    std::vector<std::array<int, 3>> triangle_edges;
    std::vector<Edge> edges;
    std::vector<double> areas;
    std::vector<int> boundary_edges;

    int num_triangles() const { return static_cast<int>(triangles.size()); }
    int num_edges() const { return static_cast<int>(edges.size()); }
    int num_vertices() const { return static_cast<int>(vertices.size()); }

    /// h_T = |T|^{1/2}
    double local_size(int tri) const;
    Vec2 centroid(int tri) const;
    /// Outward unit normal of local edge k of triangle `tri`.
    Vec2 outward_normal(int tri, int k) const;
    /// Neighbour across local edge k, or -1 on the boundary.
    int neighbour(int tri, int k) const;

    /// Cell (row from the bottom, column) containing triangle `tri`.
    std::array<int, 2> cell_of(int tri) const { return {(tri / 2) / n_subdiv, (tri / 2) % n_subdiv}; }
    bool is_upper(int tri) const { return tri % 2 == 1; }
};

/// Requires n_subdiv >= 8 and divisible by 8 so electrode endpoints at
/// multiples of 1/8 fall on mesh nodes.
Mesh build_uniform_mesh(int n_subdiv);

/// Position along the boundary, counter-clockwise from (0,0), in [0, 4).
double arc_position(const Vec2& p);

struct ElectrodeSegment {
    double start = 0.0; // arc position
    double end = 0.0;
    std::vector<int> edges;
};

struct ElectrodeMap {
    int num_electrodes = 0;
    std::vector<ElectrodeSegment> segments;
    // Electrode index per mesh edge; -1 for interior edges and gap edges.
    std::vector<int> edge_electrode;

    double electrode_length(int l, const Mesh& mesh) const;
};

/// Corner-anchored layout: L/4 electrodes per side of length `elec_len`,
/// starting at side-local offsets k/(L/4), sides traversed counter-clockwise
/// from (0,0). With L = 16 and length 1/8 the electrodes sit on
/// [0,1/8], [1/4,3/8], [1/2,5/8], [3/4,7/8] of every side.
ElectrodeMap electrode_layout(const Mesh& mesh, int num_electrodes = 16, double elec_len = 0.125);

/// Plain-text export: vertices, triangles, then boundary edges with their
/// electrode index (or -1), each block preceded by a count line.
void write_mesh(std::ostream& os, const Mesh& mesh, const ElectrodeMap& electrodes);

} // namespace wgeit
