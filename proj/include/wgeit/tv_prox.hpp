#pragma once

#include <Eigen/Core>

#include "wgeit/mesh.hpp"

namespace wgeit {

/// Piecewise-constant field in grid coordinates: m rows of cells, two
/// columns per cell (n = 2 * cells per row).
///
/// Row 0 is the top row of cells. Within cell column c, grid column 2c holds
/// the upper triangle (touching the cell's top and left sides) and 2c + 1 the
/// lower triangle (bottom and right sides). With this ordering the vertical,
/// horizontal and diagonal neighbours line up with the p, q and sqrt(2)-weighted
/// q entries of L^*.
using CellGrid = Eigen::MatrixXd;

/// Dual variables: p is (m-1) x n, q is m x (n-1).
struct DualPair {
    Eigen::MatrixXd p;
    Eigen::MatrixXd q;

    static DualPair zeros(int m, int n) { return {Eigen::MatrixXd::Zero(m - 1, n), Eigen::MatrixXd::Zero(m, n - 1)}; }
    double dot(const DualPair& o) const { return (p.array() * o.p.array()).sum() + (q.array() * o.q.array()).sum(); }
    double squared_norm() const { return p.squaredNorm() + q.squaredNorm(); }
};

CellGrid field_to_grid(const Mesh& mesh, const Eigen::VectorXd& values);
Eigen::VectorXd grid_to_field(const Mesh& mesh, const CellGrid& grid);

/// N_h(sigma) = sum over interior edges of |jump| * |e|, computed on the mesh.
double tv_norm(const Mesh& mesh, const Eigen::VectorXd& values);

/// Anisotropic TV of a grid with unit cells: sum of |L^* x| entries. For a
/// mesh of size h, N_h = h * tv_grid.
double tv_grid(const CellGrid& x);

CellGrid apply_L(const DualPair& dual);
DualPair apply_Lstar(const CellGrid& x);

/// Entrywise clip of p and q to [-1, 1].
DualPair project_P(const DualPair& dual);
/// Entrywise clip to [lambda, 1/lambda].
CellGrid project_C(const CellGrid& x, double lambda);

/// h(p, q) = -|H_C(d - beta L(p,q))|^2 + |d - beta L(p,q)|^2, H_C = I - P_C.
double dual_objective(const DualPair& dual, const CellGrid& d, double beta, double lambda);
/// grad h = -2 beta L^* P_C(d - beta L(p, q))
DualPair dual_gradient(const DualPair& dual, const CellGrid& d, double beta, double lambda);

/// |x - d|^2 + 2 beta TV(x)
double denoise_objective(const CellGrid& x, const CellGrid& d, double beta);
/// Primal value at P_C(d - beta L(p,q)) minus the dual value |d|^2 - h(p, q).
double primal_dual_gap(const DualPair& dual, const CellGrid& d, double beta, double lambda);

struct FgpOptions {
    int max_iter = 50;
    double tol = 1e-5; // relative change of the primal iterate
};

struct FgpResult {
    CellGrid x;
    DualPair dual;
    int iterations = 0;
};

/// Fast gradient projection on the dual of
///   min_{x in C} |x - d|^2 + 2 beta TV(x)
/// with step 1/(8 beta) and Nesterov momentum; returns P_C(d - beta L(p*, q*)).
FgpResult fgp_denoise(const CellGrid& d, double beta, double lambda, const FgpOptions& options = {});

} // namespace wgeit
