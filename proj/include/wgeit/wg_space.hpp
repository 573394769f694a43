#pragma once

#include <functional>

#include <Eigen/Core>

#include "wgeit/mesh.hpp"

namespace wgeit {

using ScalarFunction = std::function<double(const Vec2&)>;
using VectorFunction = std::function<Vec2(const Vec2&)>;

/// Lowest-order weak function {v0, vb}: a linear v0 per triangle stored by
/// its three vertex values (local vertex order), and one constant trace per
/// edge shared by the incident triangles.
struct WgField {
    Eigen::VectorXd interior; // 3 * num_triangles
    Eigen::VectorXd traces;   // num_edges

    WgField() = default;
    explicit WgField(const Mesh& mesh)
        : interior(Eigen::VectorXd::Zero(3 * mesh.num_triangles())), traces(Eigen::VectorXd::Zero(mesh.num_edges()))
    {
    }

    auto local(int tri) { return interior.segment<3>(3 * tri); }
    auto local(int tri) const { return interior.segment<3>(3 * tri); }
};

/// One constant vector per triangle (column t).
using WeakGradient = Eigen::Matrix2Xd;

/// Local map from the three edge traces of `tri` (local edge order) to the
/// weak gradient: columns are |e_k| n_k / |T|.
Eigen::Matrix<double, 2, 3> weak_gradient_operator(const Mesh& mesh, int tri);

/// (grad_w v, q)_T = <v_b, q.n>_{dT} for constant q, i.e.
/// grad_w v = |T|^{-1} sum_e v_b,e |e| n_e.
WeakGradient weak_gradient(const Mesh& mesh, const WgField& field);

/// Value of the interior linear of `tri` averaged over its local edge k.
double interior_edge_mean(const WgField& field, int tri, int k);

/// Element-wise L2 projection onto P1, computed with the degree-4 rule.
Eigen::VectorXd project_Q0(const ScalarFunction& phi, const Mesh& mesh);

/// Edge average of phi (3-point Gauss).
double project_Qb(const ScalarFunction& phi, const Mesh& mesh, int edge);

/// Q_h phi = {Q0 phi, Qb phi}.
WgField project_Qh(const ScalarFunction& phi, const Mesh& mesh);

/// Element average of a vector field: the L2 projection onto piecewise
/// constant vectors (degree-4 rule).
WeakGradient project_gradient(const VectorFunction& grad, const Mesh& mesh);

/// s(u, v) = sum_T h_T^{-1} <Qb u0 - ub, Qb v0 - vb>_{dT}
double stabilizer_pairing(const Mesh& mesh, const WgField& u, const WgField& v);

/// Discrete energy pieces used by the norm-equivalence checks.
double weak_gradient_seminorm_sq(const Mesh& mesh, const WgField& v);
double broken_h1_seminorm_sq(const Mesh& mesh, const WgField& v);

/// sum_T ||v0||^2_{L2(T)}, exact for the P1 interior.
double interior_l2_norm_sq(const Mesh& mesh, const Eigen::VectorXd& interior);

void check_conforms(const Mesh& mesh, const WgField& field);

} // namespace wgeit
