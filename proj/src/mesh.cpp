#include "wgeit/mesh.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "wgeit/error.hpp"

namespace wgeit {

double Mesh::local_size(int tri) const { return std::sqrt(areas[tri]); }

Vec2 Mesh::centroid(int tri) const
{
    const auto& t = triangles[tri];
    return (vertices[t[0]] + vertices[t[1]] + vertices[t[2]]) / 3.0;
}

Vec2 Mesh::outward_normal(int tri, int k) const
{
    const Edge& e = edges[triangle_edges[tri][k]];
    return e.tri[0] == tri ? e.normal : Vec2(-e.normal);
}

int Mesh::neighbour(int tri, int k) const
{
    const Edge& e = edges[triangle_edges[tri][k]];
    return e.tri[0] == tri ? e.tri[1] : e.tri[0];
}

Mesh build_uniform_mesh(int n_subdiv)
{
    if (n_subdiv < 8 || n_subdiv % 8 != 0) {
        throw InvalidArgument("build_uniform_mesh: n_subdiv must be a positive multiple of 8, got " +
                              std::to_string(n_subdiv));
    }
    Mesh mesh;
    const int n = n_subdiv;
    mesh.n_subdiv = n;
    mesh.h = 1.0 / n;

    mesh.vertices.reserve((n + 1) * (n + 1));
    for (int r = 0; r <= n; ++r)
        for (int c = 0; c <= n; ++c)
            mesh.vertices.emplace_back(static_cast<double>(c) / n, static_cast<double>(r) / n);

    auto vid = [n](int c, int r) { return r * (n + 1) + c; };
    mesh.triangles.reserve(2 * n * n);
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            const int v00 = vid(c, r), v10 = vid(c + 1, r), v11 = vid(c + 1, r + 1), v01 = vid(c, r + 1);
            mesh.triangles.push_back({v00, v10, v11});
            mesh.triangles.push_back({v00, v11, v01});
        }
    }

    const int nt = mesh.num_triangles();
    mesh.areas.assign(nt, 0.0);
    mesh.triangle_edges.assign(nt, {-1, -1, -1});

    std::unordered_map<long long, int> edge_index;
    edge_index.reserve(3 * nt);
    const long long nv = mesh.num_vertices();
    for (int t = 0; t < nt; ++t) {
        const auto& tv = mesh.triangles[t];
        const Vec2 a = mesh.vertices[tv[1]] - mesh.vertices[tv[0]];
        const Vec2 b = mesh.vertices[tv[2]] - mesh.vertices[tv[0]];
        mesh.areas[t] = 0.5 * (a.x() * b.y() - a.y() * b.x());

        for (int k = 0; k < 3; ++k) {
            const int va = tv[(k + 1) % 3];
            const int vb = tv[(k + 2) % 3];
            const long long key = std::min(va, vb) * nv + std::max(va, vb);
            auto [it, inserted] = edge_index.try_emplace(key, mesh.num_edges());
            if (inserted) {
                Edge e;
                e.vertices = {va, vb};
                const Vec2 d = mesh.vertices[vb] - mesh.vertices[va];
                e.length = d.norm();
                // Counter-clockwise triangles: the outward normal is the tangent rotated clockwise.
                e.normal = Vec2(d.y(), -d.x()) / e.length;
                e.tri[0] = t;
                mesh.edges.push_back(e);
            } else {
                mesh.edges[it->second].tri[1] = t;
            }
            mesh.triangle_edges[t][k] = it->second;
        }
    }

    for (int e = 0; e < mesh.num_edges(); ++e)
        if (mesh.edges[e].is_boundary())
            mesh.boundary_edges.push_back(e);
    return mesh;
}

double arc_position(const Vec2& p)
{
    constexpr double tol = 1e-12;
    if (std::abs(p.y()) < tol && p.x() < 1.0 - tol)
        return p.x();
    if (std::abs(p.x() - 1.0) < tol && p.y() < 1.0 - tol)
        return 1.0 + p.y();
    if (std::abs(p.y() - 1.0) < tol && p.x() > tol)
        return 2.0 + (1.0 - p.x());
    if (std::abs(p.x()) < tol)
        return 3.0 + (1.0 - p.y());
    throw InvalidArgument("arc_position: point is not on the boundary of the unit square");
}

double ElectrodeMap::electrode_length(int l, const Mesh& mesh) const
{
    double len = 0.0;
    for (int e : segments.at(l).edges)
        len += mesh.edges[e].length;
    return len;
}

ElectrodeMap electrode_layout(const Mesh& mesh, int num_electrodes, double elec_len)
{
    if (num_electrodes <= 0 || num_electrodes % 4 != 0)
        throw InvalidArgument("electrode_layout: electrode count must be a positive multiple of 4");
    const int per_side = num_electrodes / 4;
    const double spacing = 1.0 / per_side;
    if (!(elec_len > 0.0) || elec_len >= spacing)
        throw InvalidArgument("electrode_layout: electrode length must lie in (0, " + std::to_string(spacing) +
                              ") so that electrode closures stay disjoint");

    ElectrodeMap map;
    map.num_electrodes = num_electrodes;
    map.segments.resize(num_electrodes);
    const double n = mesh.n_subdiv;
    for (int side = 0; side < 4; ++side) {
        for (int k = 0; k < per_side; ++k) {
            auto& seg = map.segments[side * per_side + k];
            seg.start = side + k * spacing;
            seg.end = seg.start + elec_len;
            for (double endpoint : {seg.start, seg.end}) {
                const double scaled = endpoint * n;
                if (std::abs(scaled - std::round(scaled)) > 1e-9) {
                    std::ostringstream msg;
                    msg << "electrode_layout: endpoint at arc position " << endpoint << " of electrode "
                        << side * per_side + k << " does not coincide with a node of the " << mesh.n_subdiv
                        << "x" << mesh.n_subdiv << " mesh";
                    throw InvalidArgument(msg.str());
                }
            }
        }
    }

    map.edge_electrode.assign(mesh.num_edges(), -1);
    for (int e : mesh.boundary_edges) {
        const auto& edge = mesh.edges[e];
        const Vec2 mid = 0.5 * (mesh.vertices[edge.vertices[0]] + mesh.vertices[edge.vertices[1]]);
        const double s = arc_position(mid);
        for (int l = 0; l < num_electrodes; ++l) {
            const auto& seg = map.segments[l];
            if (s > seg.start && s < seg.end) {
                map.edge_electrode[e] = l;
                map.segments[l].edges.push_back(e);
                break;
            }
        }
    }
    return map;
}

void write_mesh(std::ostream& os, const Mesh& mesh, const ElectrodeMap& electrodes)
{
    os << std::setprecision(17);
    os << "# vertices " << mesh.num_vertices() << '\n';
    for (const auto& v : mesh.vertices)
        os << v.x() << ' ' << v.y() << '\n';
    os << "# triangles " << mesh.num_triangles() << '\n';
    for (const auto& t : mesh.triangles)
        os << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    os << "# boundary_edges " << mesh.boundary_edges.size() << '\n';
    for (int e : mesh.boundary_edges) {
        const auto& edge = mesh.edges[e];
        os << edge.vertices[0] << ' ' << edge.vertices[1] << ' ' << electrodes.edge_electrode[e] << '\n';
    }
}

} // namespace wgeit
