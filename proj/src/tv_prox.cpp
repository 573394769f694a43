#include "wgeit/tv_prox.hpp"

#include <cmath>
#include <string>

#include "wgeit/error.hpp"

namespace wgeit {

namespace {

const double kSqrt2 = std::sqrt(2.0);

void check_grid(const CellGrid& x)
{
    if (x.rows() < 1 || x.cols() < 2 || x.cols() % 2 != 0)
        throw InvalidArgument("cell grid must have at least one row and an even, positive number of columns");
}

void check_dual(const DualPair& dual)
{
    const auto m = dual.q.rows();
    const auto n = dual.p.cols();
    if (dual.p.rows() != m - 1 || dual.q.cols() != n - 1 || n % 2 != 0)
        throw InvalidArgument("dual pair shapes are inconsistent: p is " + std::to_string(dual.p.rows()) + "x" +
                              std::to_string(dual.p.cols()) + ", q is " + std::to_string(dual.q.rows()) + "x" +
                              std::to_string(dual.q.cols()));
}

} // namespace

CellGrid field_to_grid(const Mesh& mesh, const Eigen::VectorXd& values)
{
    const int n = mesh.n_subdiv;
    if (values.size() != mesh.num_triangles())
        throw InvalidArgument("field_to_grid: field size does not match the mesh");
    CellGrid grid(n, 2 * n);
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            const int cell = r * n + c;
            grid(n - 1 - r, 2 * c) = values[2 * cell + 1];
            grid(n - 1 - r, 2 * c + 1) = values[2 * cell];
        }
    }
    return grid;
}

Eigen::VectorXd grid_to_field(const Mesh& mesh, const CellGrid& grid)
{
    const int n = mesh.n_subdiv;
    if (grid.rows() != n || grid.cols() != 2 * n)
        throw InvalidArgument("grid_to_field: grid shape does not match the mesh");
    Eigen::VectorXd values(mesh.num_triangles());
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            const int cell = r * n + c;
            values[2 * cell + 1] = grid(n - 1 - r, 2 * c);
            values[2 * cell] = grid(n - 1 - r, 2 * c + 1);
        }
    }
    return values;
}

double tv_norm(const Mesh& mesh, const Eigen::VectorXd& values)
{
    if (values.size() != mesh.num_triangles())
        throw InvalidArgument("tv_norm: field size does not match the mesh");
    double tv = 0.0;
    for (const auto& e : mesh.edges)
        if (!e.is_boundary())
            tv += std::abs(values[e.tri[0]] - values[e.tri[1]]) * e.length;
    return tv;
}

double tv_grid(const CellGrid& x)
{
    const DualPair g = apply_Lstar(x);
    return g.p.cwiseAbs().sum() + g.q.cwiseAbs().sum();
}

CellGrid apply_L(const DualPair& dual)
{
    check_dual(dual);
    const auto& p = dual.p;
    const auto& q = dual.q;
    const int m = static_cast<int>(q.rows());
    const int n = static_cast<int>(p.cols());
    const int cells = n / 2;
    CellGrid out(m, n);
    for (int i = 0; i < m; ++i) {
        for (int c = 0; c < cells; ++c) {
            const int a = 2 * c;     // upper triangle
            const int b = 2 * c + 1; // lower triangle
            double va = kSqrt2 * q(i, a);
            if (i > 0)
                va -= p(i - 1, b);
            if (c > 0)
                va -= q(i, a - 1);
            double vb = -kSqrt2 * q(i, a);
            if (c < cells - 1)
                vb += q(i, b);
            if (i < m - 1)
                vb += p(i, b);
            out(i, a) = va;
            out(i, b) = vb;
        }
    }
    return out;
}

DualPair apply_Lstar(const CellGrid& x)
{
    check_grid(x);
    const int m = static_cast<int>(x.rows());
    const int n = static_cast<int>(x.cols());
    const int cells = n / 2;
    DualPair out = DualPair::zeros(m, n);
    for (int i = 0; i < m; ++i) {
        for (int c = 0; c < cells; ++c) {
            const int a = 2 * c;
            const int b = 2 * c + 1;
            if (i < m - 1)
                out.p(i, b) = x(i, b) - x(i + 1, a);
            if (c < cells - 1)
                out.q(i, b) = x(i, b) - x(i, b + 1);
            out.q(i, a) = kSqrt2 * (x(i, a) - x(i, b));
        }
    }
    return out;
}

DualPair project_P(const DualPair& dual)
{
    return {dual.p.cwiseMax(-1.0).cwiseMin(1.0), dual.q.cwiseMax(-1.0).cwiseMin(1.0)};
}

CellGrid project_C(const CellGrid& x, double lambda)
{
    return x.cwiseMax(lambda).cwiseMin(1.0 / lambda);
}

double dual_objective(const DualPair& dual, const CellGrid& d, double beta, double lambda)
{
    const CellGrid w = d - beta * apply_L(dual);
    const CellGrid hc = w - project_C(w, lambda);
    return -hc.squaredNorm() + w.squaredNorm();
}

DualPair dual_gradient(const DualPair& dual, const CellGrid& d, double beta, double lambda)
{
    DualPair g = apply_Lstar(project_C(d - beta * apply_L(dual), lambda));
    g.p *= -2.0 * beta;
    g.q *= -2.0 * beta;
    return g;
}

double denoise_objective(const CellGrid& x, const CellGrid& d, double beta)
{
    return (x - d).squaredNorm() + 2.0 * beta * tv_grid(x);
}

double primal_dual_gap(const DualPair& dual, const CellGrid& d, double beta, double lambda)
{
    const CellGrid x = project_C(d - beta * apply_L(dual), lambda);
    const double primal = denoise_objective(x, d, beta);
    const double dual_value = d.squaredNorm() - dual_objective(dual, d, beta, lambda);
    return primal - dual_value;
}

FgpResult fgp_denoise(const CellGrid& d, double beta, double lambda, const FgpOptions& options)
{
    check_grid(d);
    if (!(beta >= 0.0))
        throw InvalidArgument("fgp_denoise: beta must be non-negative");
    if (!d.allFinite())
        throw InvalidArgument("fgp_denoise: input contains non-finite values");

    const int m = static_cast<int>(d.rows());
    const int n = static_cast<int>(d.cols());
    FgpResult res{project_C(d, lambda), DualPair::zeros(m, n), 0};
    if (beta == 0.0)
        return res;

    const double step = 1.0 / (8.0 * beta);
    DualPair rs = DualPair::zeros(m, n);
    DualPair prev = DualPair::zeros(m, n);
    CellGrid x_prev = res.x;
    double t = 1.0;
    for (int k = 1; k <= options.max_iter; ++k) {
        const CellGrid y = project_C(d - beta * apply_L(rs), lambda);
        DualPair g = apply_Lstar(y);
        DualPair pq = project_P({rs.p + step * g.p, rs.q + step * g.q});
        res.x = project_C(d - beta * apply_L(pq), lambda);
        res.dual = pq;
        res.iterations = k;

        const double xn = res.x.norm();
        const double eps = (res.x - x_prev).norm() / (xn > 0.0 ? xn : 1.0);
        if (eps < options.tol)
            break;

        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        const double mom = (t - 1.0) / t_next;
        rs.p = pq.p + mom * (pq.p - prev.p);
        rs.q = pq.q + mom * (pq.q - prev.q);
        prev = std::move(pq);
        x_prev = res.x;
        t = t_next;
    }
    return res;
}

} // namespace wgeit
