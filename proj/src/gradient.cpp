#include "wgeit/gradient.hpp"

#include <algorithm>
#include <cmath>

#include "wgeit/error.hpp"
#include "wgeit/parallel.hpp"

namespace wgeit {

AdjointSolution solve_adjoint(const LinearSystem& system, const Eigen::VectorXd& residual)
{
    // <r, V> only sees the zero-sum part of r, which is what rhs() keeps.
    const ForwardSolution s = system.unpack(system.solve(system.rhs(residual)));
    return {s.u, s.U};
}

MisfitGradient misfit_gradient(const Mesh& mesh, const std::vector<ForwardSolution>& forward,
                               const std::vector<AdjointSolution>& adjoint)
{
    if (forward.size() != adjoint.size())
        throw InvalidArgument("misfit_gradient: " + std::to_string(forward.size()) + " forward and " +
                              std::to_string(adjoint.size()) + " adjoint solutions");
    MisfitGradient grad = MisfitGradient::Zero(mesh.num_triangles());
    for (std::size_t k = 0; k < forward.size(); ++k) {
        const WeakGradient gu = weak_gradient(mesh, forward[k].u);
        const WeakGradient gz = weak_gradient(mesh, adjoint[k].z);
        for (int t = 0; t < mesh.num_triangles(); ++t)
            grad[t] -= 2.0 * mesh.areas[t] * gu.col(t).dot(gz.col(t));
    }
    return grad;
}

Misfit::Misfit(const Mesh& mesh, const ElectrodeModel& electrodes, std::vector<CurrentPattern> patterns,
               Eigen::MatrixXd data)
    : mesh_(&mesh), electrodes_(&electrodes), patterns_(std::move(patterns)), data_(std::move(data))
{
    if (data_.rows() != static_cast<Eigen::Index>(patterns_.size()) || data_.cols() != electrodes.size())
        throw InvalidArgument("Misfit: data must be " + std::to_string(patterns_.size()) + " x " +
                              std::to_string(electrodes.size()));
}

Eigen::MatrixXd Misfit::residuals(const LinearSystem& system) const
{
    return forward_map(system, patterns_) - data_;
}

double Misfit::value(const ConductivityField& sigma) const
{
    const LinearSystem system = assemble(*mesh_, *electrodes_, sigma);
    return residuals(system).squaredNorm();
}

Misfit::ValueAndGradient Misfit::value_and_gradient(const ConductivityField& sigma) const
{
    const LinearSystem system = assemble(*mesh_, *electrodes_, sigma);
    const int K = num_patterns();
    std::vector<ForwardSolution> forward(K);
    std::vector<AdjointSolution> adjoint(K);
    Eigen::MatrixXd res(K, electrodes_->size());
    parallel_for(K, [&](int k) {
        forward[k] = solve_forward(system, patterns_[k]);
        res.row(k) = forward[k].U.transpose() - data_.row(k);
        adjoint[k] = solve_adjoint(system, res.row(k).transpose());
    });
    return {res.squaredNorm(), misfit_gradient(*mesh_, forward, adjoint)};
}

std::vector<FdSample> directional_check(const Misfit& misfit, const ConductivityField& sigma,
                                        const Eigen::VectorXd& direction, const std::vector<double>& steps)
{
    if (direction.size() != sigma.size())
        throw InvalidArgument("directional_check: direction length does not match sigma");
    const double analytic = misfit.value_and_gradient(sigma).gradient.dot(direction);
    std::vector<FdSample> out;
    for (double t : steps) {
        if (!(t > 0.0))
            throw InvalidArgument("directional_check: step sizes must be positive");
        const Eigen::VectorXd plus = sigma.values + t * direction;
        const Eigen::VectorXd minus = sigma.values - t * direction;
        if (plus.minCoeff() <= 0.0 || minus.minCoeff() <= 0.0)
            throw InvalidArgument("directional_check: step " + std::to_string(t) + " leaves sigma > 0");
        const double fd = (misfit.value(ConductivityField::widened(plus, sigma.lambda)) -
                           misfit.value(ConductivityField::widened(minus, sigma.lambda))) /
                          (2.0 * t);
        out.push_back({t, fd, analytic, std::abs(fd - analytic) / std::max(std::abs(analytic), 1e-300)});
    }
    return out;
}

double loglog_slope(const std::vector<FdSample>& samples)
{
    if (samples.size() < 2)
        throw InvalidArgument("loglog_slope: need at least two samples");
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const double n = static_cast<double>(samples.size());
    for (const auto& s : samples) {
        const double x = std::log(s.t), y = std::log(s.rel_err);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

} // namespace wgeit
