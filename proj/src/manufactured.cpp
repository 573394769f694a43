#include "wgeit/manufactured.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

#include "wgeit/error.hpp"
#include "wgeit/quadrature.hpp"

namespace wgeit {

namespace {

constexpr double kRadiusSq = 0.25;

// 1/s beyond this makes exp(-1/s) underflow; every term then vanishes.
constexpr double kUnderflow = 700.0;

} // namespace

ManufacturedSolution bump_solution()
{
    ManufacturedSolution ms;
    ms.name = "bump";
    ms.u = [](const Vec2& p) {
        const double s = kRadiusSq - (p - Vec2(0.5, 0.5)).squaredNorm();
        if (s <= 0.0 || 1.0 / s > kUnderflow)
            return 0.0;
        return std::exp(-1.0 / s);
    };
    ms.grad_u = [](const Vec2& p) -> Vec2 {
        const Vec2 d = p - Vec2(0.5, 0.5);
        const double s = kRadiusSq - d.squaredNorm();
        if (s <= 0.0 || 1.0 / s > kUnderflow)
            return Vec2::Zero();
        return std::exp(-1.0 / s) * (-2.0 / (s * s)) * d;
    };
    ms.f = [](const Vec2& p) {
        const Vec2 d = p - Vec2(0.5, 0.5);
        const double r2 = d.squaredNorm();
        const double s = kRadiusSq - r2;
        if (s <= 0.0 || 1.0 / s > kUnderflow)
            return 0.0;
        // u = exp(phi), phi = -1/s: lap u = u (|grad phi|^2 + lap phi)
        const double u = std::exp(-1.0 / s);
        const double s2 = s * s;
        const double grad_phi_sq = 4.0 * r2 / (s2 * s2);
        const double lap_phi = -4.0 / s2 - 8.0 * r2 / (s2 * s);
        return -u * (grad_phi_sq + lap_phi);
    };
    ms.sigma = [](const Vec2&) { return 1.0; };
    return ms;
}

ManufacturedSolution linear_solution(double a, double b, double c)
{
    ManufacturedSolution ms;
    ms.name = "linear";
    ms.u = [=](const Vec2& p) { return a + b * p.x() + c * p.y(); };
    ms.grad_u = [=](const Vec2&) { return Vec2(b, c); };
    ms.f = [](const Vec2&) { return 0.0; };
    ms.sigma = [](const Vec2&) { return 1.0; };
    return ms;
}

ManufacturedProblem manufacture(const Mesh& mesh, const ElectrodeModel& electrodes, const ConductivityField& sigma,
                                const ManufacturedSolution& exact)
{
    const int nt = mesh.num_triangles();
    const int L = electrodes.size();
    ManufacturedProblem prob;
    prob.source.interior = Eigen::VectorXd::Zero(3 * nt);
    prob.source.traces = Eigen::VectorXd::Zero(mesh.num_edges());
    prob.source.electrodes = Eigen::VectorXd::Zero(L);
    prob.I = Eigen::VectorXd::Zero(L);
    prob.U = Eigen::VectorXd::Zero(L);

    for (int t = 0; t < nt; ++t) {
        const auto& tv = mesh.triangles[t];
        Eigen::Vector3d load = Eigen::Vector3d::Zero();
        for (const auto& q : quadrature::triangle_degree6()) {
            const Vec2 x = q.bary[0] * mesh.vertices[tv[0]] + q.bary[1] * mesh.vertices[tv[1]] +
                           q.bary[2] * mesh.vertices[tv[2]];
            load += q.weight * exact.f(x) * Eigen::Vector3d(q.bary[0], q.bary[1], q.bary[2]);
        }
        prob.source.interior.segment<3>(3 * t) = mesh.areas[t] * load;
    }

    // Edge integrals of the boundary flux and of u + z sigma du/dn.
    auto edge_integral = [&](int e, const ScalarFunction& g) {
        const auto& edge = mesh.edges[e];
        const Vec2& a = mesh.vertices[edge.vertices[0]];
        const Vec2& b = mesh.vertices[edge.vertices[1]];
        double sum = 0.0;
        for (const auto& q : quadrature::gauss3())
            sum += q.weight * g(a + q.t * (b - a));
        return edge.length * sum;
    };

    std::vector<double> raw_U(L, 0.0);
    for (int e : mesh.boundary_edges) {
        const auto& edge = mesh.edges[e];
        const double sig = sigma.values[edge.tri[0]];
        const Vec2 n = edge.normal;
        const ScalarFunction flux = [&](const Vec2& p) { return sig * exact.grad_u(p).dot(n); };
        const int l = electrodes.map.edge_electrode[e];
        if (l < 0) {
            prob.source.traces[e] += edge_integral(e, flux);
        } else {
            const double z = electrodes.z[l];
            prob.I[l] += edge_integral(e, flux);
            raw_U[l] += edge_integral(e, [&](const Vec2& p) { return exact.u(p) + z * flux(p); });
        }
    }
    for (int l = 0; l < L; ++l)
        raw_U[l] /= electrodes.map.electrode_length(l, mesh);
    double mean_U = 0.0;
    for (double v : raw_U)
        mean_U += v / L;
    for (int l = 0; l < L; ++l)
        prob.U[l] = raw_U[l] - mean_U;

    for (int l = 0; l < L; ++l) {
        const double z = electrodes.z[l];
        for (int e : electrodes.map.segments[l].edges) {
            const double sig = sigma.values[mesh.edges[e].tri[0]];
            const Vec2 n = mesh.edges[e].normal;
            const double defect = edge_integral(e, [&](const Vec2& p) {
                return exact.u(p) + z * sig * exact.grad_u(p).dot(n) - prob.U[l];
            });
            prob.source.traces[e] += defect / z;
            prob.source.electrodes[l] -= defect / z;
        }
    }

    // Quadrature leaves the electrode currents off zero-sum by rounding only.
    prob.I.array() -= prob.I.mean();
    return prob;
}

std::vector<ConvergenceRow> convergence_study(const ManufacturedSolution& exact, const std::vector<int>& n_subdivs,
                                              const ConvergenceOptions& options)
{
    std::vector<ConvergenceRow> rows;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (int n : n_subdivs) {
        const Mesh mesh = build_uniform_mesh(n);
        const ElectrodeModel electrodes = ElectrodeModel::uniform(
            electrode_layout(mesh, options.num_electrodes, options.electrode_length), options.contact_impedance);
        const ConductivityField sigma = ConductivityField::sample(mesh, exact.sigma, options.lambda);
        const ManufacturedProblem prob = manufacture(mesh, electrodes, sigma, exact);

        const LinearSystem system = assemble(mesh, electrodes, sigma);
        const ForwardSolution sol = solve_forward(system, CurrentPattern(prob.I), &prob.source);

        ConvergenceRow row;
        row.n_subdiv = n;
        row.h = mesh.h;
        row.err_u = std::sqrt(interior_l2_norm_sq(mesh, sol.u.interior - project_Q0(exact.u, mesh)));
        row.err_U = (sol.U - prob.U).norm();
        row.order_u = nan;
        row.order_U = nan;
        if (!rows.empty()) {
            const auto& prev = rows.back();
            const double ratio = std::log(prev.h / row.h);
            row.order_u = std::log(prev.err_u / row.err_u) / ratio;
            row.order_U = std::log(prev.err_U / row.err_U) / ratio;
        }
        rows.push_back(row);
    }
    return rows;
}

void write_convergence_csv(std::ostream& os, const std::vector<ConvergenceRow>& rows)
{
    os << "h,err_u,order_u,err_U,order_U\n";
    os << std::setprecision(10);
    auto opt = [&](double v) {
        if (!std::isnan(v))
            os << v;
    };
    for (const auto& r : rows) {
        os << r.h << ',' << r.err_u << ',';
        opt(r.order_u);
        os << ',' << r.err_U << ',';
        opt(r.order_U);
        os << '\n';
    }
}

} // namespace wgeit
