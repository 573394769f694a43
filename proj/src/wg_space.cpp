#include "wgeit/wg_space.hpp"

#include <string>

#include "wgeit/error.hpp"
#include "wgeit/quadrature.hpp"

namespace wgeit {

namespace {

Vec2 at_bary(const Mesh& mesh, int tri, const std::array<double, 3>& b)
{
    const auto& t = mesh.triangles[tri];
    return b[0] * mesh.vertices[t[0]] + b[1] * mesh.vertices[t[1]] + b[2] * mesh.vertices[t[2]];
}

// Gradient of the linear function with the given vertex values.
Vec2 p1_gradient(const Mesh& mesh, int tri, const Eigen::Vector3d& values)
{
    const auto& t = mesh.triangles[tri];
    Vec2 g = Vec2::Zero();
    const double two_area = 2.0 * mesh.areas[tri];
    for (int i = 0; i < 3; ++i) {
        // grad lambda_i = rot(p_{i+2} - p_{i+1}) / 2|T|
        const Vec2 d = mesh.vertices[t[(i + 2) % 3]] - mesh.vertices[t[(i + 1) % 3]];
        g += values[i] * Vec2(-d.y(), d.x()) / two_area;
    }
    return g;
}

} // namespace

void check_conforms(const Mesh& mesh, const WgField& field)
{
    if (field.interior.size() != 3 * mesh.num_triangles() || field.traces.size() != mesh.num_edges()) {
        throw InvalidArgument("WgField does not match mesh: expected " + std::to_string(3 * mesh.num_triangles()) +
                              " interior and " + std::to_string(mesh.num_edges()) + " trace values, got " +
                              std::to_string(field.interior.size()) + " and " + std::to_string(field.traces.size()));
    }
}

Eigen::Matrix<double, 2, 3> weak_gradient_operator(const Mesh& mesh, int tri)
{
    Eigen::Matrix<double, 2, 3> g;
    const double inv_area = 1.0 / mesh.areas[tri];
    for (int k = 0; k < 3; ++k) {
        const double len = mesh.edges[mesh.triangle_edges[tri][k]].length;
        g.col(k) = inv_area * len * mesh.outward_normal(tri, k);
    }
    return g;
}

WeakGradient weak_gradient(const Mesh& mesh, const WgField& field)
{
    check_conforms(mesh, field);
    WeakGradient grad(2, mesh.num_triangles());
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const auto& te = mesh.triangle_edges[t];
        const Eigen::Vector3d vb(field.traces[te[0]], field.traces[te[1]], field.traces[te[2]]);
        grad.col(t) = weak_gradient_operator(mesh, t) * vb;
    }
    return grad;
}

double interior_edge_mean(const WgField& field, int tri, int k)
{
    const auto v = field.local(tri);
    return 0.5 * (v[(k + 1) % 3] + v[(k + 2) % 3]);
}

Eigen::VectorXd project_Q0(const ScalarFunction& phi, const Mesh& mesh)
{
    Eigen::VectorXd coeffs(3 * mesh.num_triangles());
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        Eigen::Vector3d rhs = Eigen::Vector3d::Zero();
        for (const auto& q : quadrature::triangle_degree4()) {
            const double w = q.weight * phi(at_bary(mesh, t, q.bary));
            rhs += w * Eigen::Vector3d(q.bary[0], q.bary[1], q.bary[2]);
        }
        // P1 mass matrix is |T|/12 (I + J); its inverse is 12/|T| (I - J/4).
        // rhs carries a factor |T| that cancels here.
        coeffs.segment<3>(3 * t) = 12.0 * (rhs.array() - rhs.sum() / 4.0).matrix();
    }
    return coeffs;
}

double project_Qb(const ScalarFunction& phi, const Mesh& mesh, int edge)
{
    const auto& e = mesh.edges.at(edge);
    const Vec2& a = mesh.vertices[e.vertices[0]];
    const Vec2& b = mesh.vertices[e.vertices[1]];
    double mean = 0.0;
    for (const auto& q : quadrature::gauss3())
        mean += q.weight * phi(a + q.t * (b - a));
    return mean;
}

WgField project_Qh(const ScalarFunction& phi, const Mesh& mesh)
{
    WgField field;
    field.interior = project_Q0(phi, mesh);
    field.traces.resize(mesh.num_edges());
    for (int e = 0; e < mesh.num_edges(); ++e)
        field.traces[e] = project_Qb(phi, mesh, e);
    return field;
}

WeakGradient project_gradient(const VectorFunction& grad, const Mesh& mesh)
{
    WeakGradient out(2, mesh.num_triangles());
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        Vec2 mean = Vec2::Zero();
        for (const auto& q : quadrature::triangle_degree4())
            mean += q.weight * grad(at_bary(mesh, t, q.bary));
        out.col(t) = mean;
    }
    return out;
}

double stabilizer_pairing(const Mesh& mesh, const WgField& u, const WgField& v)
{
    check_conforms(mesh, u);
    check_conforms(mesh, v);
    double s = 0.0;
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const double inv_h = 1.0 / mesh.local_size(t);
        for (int k = 0; k < 3; ++k) {
            const int e = mesh.triangle_edges[t][k];
            const double ju = interior_edge_mean(u, t, k) - u.traces[e];
            const double jv = interior_edge_mean(v, t, k) - v.traces[e];
            s += inv_h * mesh.edges[e].length * ju * jv;
        }
    }
    return s;
}

double weak_gradient_seminorm_sq(const Mesh& mesh, const WgField& v)
{
    const WeakGradient g = weak_gradient(mesh, v);
    double sum = 0.0;
    for (int t = 0; t < mesh.num_triangles(); ++t)
        sum += mesh.areas[t] * g.col(t).squaredNorm();
    return sum;
}

double broken_h1_seminorm_sq(const Mesh& mesh, const WgField& v)
{
    check_conforms(mesh, v);
    double sum = 0.0;
    for (int t = 0; t < mesh.num_triangles(); ++t)
        sum += mesh.areas[t] * p1_gradient(mesh, t, v.local(t)).squaredNorm();
    return sum;
}

double interior_l2_norm_sq(const Mesh& mesh, const Eigen::VectorXd& interior)
{
    double sum = 0.0;
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const Eigen::Vector3d v = interior.segment<3>(3 * t);
        // v^T M v with M = |T|/12 (I + J)
        sum += mesh.areas[t] / 12.0 * (v.squaredNorm() + v.sum() * v.sum());
    }
    return sum;
}

} // namespace wgeit
