#pragma once

#include <vector>

#include "wgeit/cem_forward.hpp"

namespace wgeit {

/// Solution (z_h, Z_h) of a_s(sigma; (z, Z), (v, V)) = <r, V>.
struct AdjointSolution {
    WgField z;
    Eigen::VectorXd Z;
};

/// d f / d sigma_T, one entry per triangle.
using MisfitGradient = Eigen::VectorXd;

/// Reuses the forward factorization; a_s is symmetric so the adjoint operator
/// is the forward one.
AdjointSolution solve_adjoint(const LinearSystem& system, const Eigen::VectorXd& residual);

/// Component T: -2 sum_k |T| grad_w u^(k) . grad_w z^(k) on T.
MisfitGradient misfit_gradient(const Mesh& mesh, const std::vector<ForwardSolution>& forward,
                               const std::vector<AdjointSolution>& adjoint);

/// f(sigma) = sum_k |U_h(sigma; I^(k)) - U^delta,(k)|^2 over a fixed set of
/// patterns and measured voltages (K x L).
class Misfit {
public:
    Misfit(const Mesh& mesh, const ElectrodeModel& electrodes, std::vector<CurrentPattern> patterns,
           Eigen::MatrixXd data);

    int num_patterns() const { return static_cast<int>(patterns_.size()); }
    const Mesh& mesh() const { return *mesh_; }
    const Eigen::MatrixXd& data() const { return data_; }

    double value(const ConductivityField& sigma) const;

    struct ValueAndGradient {
        double value = 0.0;
        MisfitGradient gradient;
    };
    ValueAndGradient value_and_gradient(const ConductivityField& sigma) const;

    /// Simulated voltages minus data, K x L.
    Eigen::MatrixXd residuals(const LinearSystem& system) const;

private:
    const Mesh* mesh_;
    const ElectrodeModel* electrodes_;
    std::vector<CurrentPattern> patterns_;
    Eigen::MatrixXd data_;
};

struct FdSample {
    double t = 0.0;
    double fd_value = 0.0;       // (f(sigma + t d) - f(sigma - t d)) / 2t
    double analytic_value = 0.0; // <grad f(sigma), d>
    double rel_err = 0.0;
};

/// Central differences of the misfit along `direction` for each step size.
/// sigma +- t d must stay positive.
std::vector<FdSample> directional_check(const Misfit& misfit, const ConductivityField& sigma,
                                        const Eigen::VectorXd& direction, const std::vector<double>& steps);

/// Least-squares slope of log(rel_err) against log(t).
double loglog_slope(const std::vector<FdSample>& samples);

} // namespace wgeit
