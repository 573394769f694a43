#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "wgeit/cem_forward.hpp"

namespace wgeit {

/// Exact potential with the data needed to drive the CEM with it:
/// f = -div(sigma grad u), and sigma itself.
struct ManufacturedSolution {
    std::string name;
    ScalarFunction u;
    VectorFunction grad_u;
    ScalarFunction f;
    ScalarFunction sigma;
};

/// u = exp(-1 / (1/4 - |x - c|^2)) inside the disc of radius 1/2 around
/// c = (1/2, 1/2), zero outside; sigma = 1. u and grad u vanish on the
/// boundary of the square, so the electrode currents and voltages are zero.
ManufacturedSolution bump_solution();

/// u = a + b x + c y with sigma = 1.
ManufacturedSolution linear_solution(double a, double b, double c);

/// Right-hand side and exact electrode data for a manufactured solution.
///
/// Besides the interior load (f, v0), boundary mismatch is carried as data:
/// on gaps the flux sigma du/dn, and on electrode l the defect
/// g_l = u + z_l sigma du/dn - U_l, with U_l the zero-sum centred electrode
/// average of u + z_l sigma du/dn and I_l the electrode flux. Both vanish
/// for the bump.
struct ManufacturedProblem {
    SourceTerms source;
    Eigen::VectorXd I;
    Eigen::VectorXd U;
};

ManufacturedProblem manufacture(const Mesh& mesh, const ElectrodeModel& electrodes, const ConductivityField& sigma,
                                const ManufacturedSolution& exact);

struct ConvergenceRow {
    int n_subdiv = 0;
    double h = 0.0;
    double err_u = 0.0;   // ||u0_h - Q0 u||_{L2}
    double order_u = 0.0; // NaN on the first row
    double err_U = 0.0;   // |U_h - U|
    double order_U = 0.0;
};

struct ConvergenceOptions {
    int num_electrodes = 16;
    double electrode_length = 0.125;
    double contact_impedance = 1.0;
    double lambda = 0.25;
};

std::vector<ConvergenceRow> convergence_study(const ManufacturedSolution& exact, const std::vector<int>& n_subdivs,
                                              const ConvergenceOptions& options = {});

/// CSV with header `h,err_u,order_u,err_U,order_U`; missing orders are empty.
void write_convergence_csv(std::ostream& os, const std::vector<ConvergenceRow>& rows);

} // namespace wgeit
