#include "wgeit/cem_forward.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/LU>
#include <Eigen/SparseCholesky>

#include "wgeit/error.hpp"
#include "wgeit/parallel.hpp"

namespace wgeit {

ElectrodeModel::ElectrodeModel(ElectrodeMap m, Eigen::VectorXd impedances) : map(std::move(m)), z(std::move(impedances))
{
    if (z.size() != map.num_electrodes)
        throw InvalidArgument("ElectrodeModel: expected " + std::to_string(map.num_electrodes) +
                              " contact impedances, got " + std::to_string(z.size()));
    for (int l = 0; l < z.size(); ++l)
        if (!(z[l] > 0.0))
            throw InvalidArgument("ElectrodeModel: contact impedance of electrode " + std::to_string(l) +
                                  " must be positive");
}

ElectrodeModel ElectrodeModel::uniform(ElectrodeMap m, double z)
{
    const int L = m.num_electrodes;
    return ElectrodeModel(std::move(m), Eigen::VectorXd::Constant(L, z));
}

CurrentPattern::CurrentPattern(Eigen::VectorXd currents) : I(std::move(currents))
{
    const double scale = std::max(1.0, I.cwiseAbs().sum());
    if (std::abs(I.sum()) > 1e-10 * scale)
        throw InvalidArgument("CurrentPattern: currents must sum to zero (sum = " + std::to_string(I.sum()) + ")");
}

ConductivityField::ConductivityField(Eigen::VectorXd v, double lam) : values(std::move(v)), lambda(lam)
{
    if (!(lambda > 0.0 && lambda < 1.0))
        throw InvalidArgument("ConductivityField: lambda must lie in (0, 1)");
    const double lo = lambda, hi = 1.0 / lambda;
    for (int t = 0; t < values.size(); ++t) {
        if (!(values[t] >= lo && values[t] <= hi)) {
            std::ostringstream msg;
            msg << "ConductivityField: value " << values[t] << " on triangle " << t << " outside [" << lo << ", "
                << hi << "]";
            throw InvalidArgument(msg.str());
        }
    }
}

ConductivityField ConductivityField::constant(const Mesh& mesh, double value, double lambda)
{
    return ConductivityField(Eigen::VectorXd::Constant(mesh.num_triangles(), value), lambda);
}

ConductivityField ConductivityField::widened(Eigen::VectorXd values, double lambda)
{
    if (!(values.minCoeff() > 0.0))
        throw InvalidArgument("ConductivityField: conductivity must be positive");
    double lam = std::min({lambda, values.minCoeff(), 1.0 / values.maxCoeff()});
    while (1.0 / lam < values.maxCoeff())
        lam = std::nextafter(lam, 0.0);
    return ConductivityField(std::move(values), lam);
}

ConductivityField ConductivityField::sample(const Mesh& mesh, const ScalarFunction& sigma, double lambda)
{
    Eigen::VectorXd v(mesh.num_triangles());
    for (int t = 0; t < mesh.num_triangles(); ++t)
        v[t] = sigma(mesh.centroid(t));
    return ConductivityField(std::move(v), lambda);
}

Eigen::MatrixXd zero_sum_basis(int L)
{
    if (L < 2)
        throw InvalidArgument("zero_sum_basis: need at least two electrodes");
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(L, L - 1);
    for (int k = 1; k < L; ++k) {
        const double s = 1.0 / std::sqrt(static_cast<double>(k) * (k + 1));
        B.col(k - 1).head(k).setConstant(s);
        B(k, k - 1) = -k * s;
    }
    return B;
}

struct LinearSystem::Factorization {
    Eigen::SparseMatrix<double> condensed;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
    Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper> cg;
    bool direct = true;
};

LinearSystem::~LinearSystem() = default;
LinearSystem::LinearSystem(LinearSystem&&) noexcept = default;
LinearSystem& LinearSystem::operator=(LinearSystem&&) noexcept = default;

LinearSystem::LinearSystem(const Mesh& mesh, const ElectrodeModel& electrodes, const ConductivityField& sigma,
                           SolverOptions options)
    : mesh_(&mesh), electrodes_(&electrodes), sigma_(sigma), options_(options),
      basis_(zero_sum_basis(electrodes.size())), factor_(std::make_unique<Factorization>())
{
    if (sigma.size() != mesh.num_triangles())
        throw InvalidArgument("assemble: conductivity has " + std::to_string(sigma.size()) + " values for " +
                              std::to_string(mesh.num_triangles()) + " triangles");
    if (static_cast<int>(electrodes.map.edge_electrode.size()) != mesh.num_edges())
        throw InvalidArgument("assemble: electrode map was built for a different mesh");

    const int nt = mesh.num_triangles();
    const int ne = mesh.num_edges();
    const int L = electrodes.size();
    const int nv = L - 1;
    const int tb = 3 * nt;      // first trace unknown
    const int vb = tb + ne;     // first voltage unknown
    const int n_full = vb + nv;
    const int n_cond = ne + nv; // condensed: traces then voltages

    interior_inverse_.resize(nt);
    coupling_.resize(nt);

    std::vector<Eigen::Triplet<double>> full;
    std::vector<Eigen::Triplet<double>> cond;
    full.reserve(27 * nt + 3 * ne + 64);
    cond.reserve(9 * nt + 3 * ne + 64);

    for (int t = 0; t < nt; ++t) {
        const auto& te = mesh.triangle_edges[t];
        const double inv_h = 1.0 / mesh.local_size(t);

        // Q_b of the interior linear on local edge k is m_k . v0 with m_k
        // averaging the two endpoints of that edge.
        Eigen::Matrix3d M = 0.5 * (Eigen::Matrix3d::Ones() - Eigen::Matrix3d::Identity());
        Eigen::Vector3d w;
        for (int k = 0; k < 3; ++k)
            w[k] = inv_h * mesh.edges[te[k]].length;

        const Eigen::Matrix3d K00 = M * w.asDiagonal() * M.transpose();
        const Eigen::Matrix3d K0b = -(M * w.asDiagonal());
        const Eigen::Matrix<double, 2, 3> G = weak_gradient_operator(mesh, t);
        const Eigen::Matrix3d Kbb =
            Eigen::Matrix3d(w.asDiagonal()) + sigma.values[t] * mesh.areas[t] * G.transpose() * G;

        interior_inverse_[t] = K00.inverse();
        coupling_[t] = K0b;
        const Eigen::Matrix3d schur = Kbb - K0b.transpose() * interior_inverse_[t] * K0b;

        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                full.emplace_back(3 * t + i, 3 * t + j, K00(i, j));
                full.emplace_back(3 * t + i, tb + te[j], K0b(i, j));
                full.emplace_back(tb + te[j], 3 * t + i, K0b(i, j));
                full.emplace_back(tb + te[i], tb + te[j], Kbb(i, j));
                cond.emplace_back(te[i], te[j], schur(i, j));
            }
        }
    }

    // Electrode coupling: sum_l z_l^{-1} <u_b - U_l, v_b - V_l>_{e_l}, U = B c.
    for (int l = 0; l < L; ++l) {
        const double inv_z = 1.0 / electrodes.z[l];
        const Eigen::RowVectorXd Bl = basis_.row(l);
        for (int e : electrodes.map.segments[l].edges) {
            const double c = inv_z * mesh.edges[e].length;
            full.emplace_back(tb + e, tb + e, c);
            cond.emplace_back(e, e, c);
            for (int k = 0; k < nv; ++k) {
                full.emplace_back(tb + e, vb + k, -c * Bl[k]);
                full.emplace_back(vb + k, tb + e, -c * Bl[k]);
                cond.emplace_back(e, ne + k, -c * Bl[k]);
                cond.emplace_back(ne + k, e, -c * Bl[k]);
                for (int k2 = 0; k2 < nv; ++k2) {
                    full.emplace_back(vb + k, vb + k2, c * Bl[k] * Bl[k2]);
                    cond.emplace_back(ne + k, ne + k2, c * Bl[k] * Bl[k2]);
                }
            }
        }
    }

    matrix_.resize(n_full, n_full);
    matrix_.setFromTriplets(full.begin(), full.end());
    factor_->condensed.resize(n_cond, n_cond);
    factor_->condensed.setFromTriplets(cond.begin(), cond.end());

    if (n_cond <= options_.direct_max_unknowns) {
        factor_->ldlt.compute(factor_->condensed);
        if (factor_->ldlt.info() != Eigen::Success)
            throw NumericalError("assemble: sparse LDL^T factorization failed");
        if (!(factor_->ldlt.vectorD().minCoeff() > 0.0))
            throw NumericalError("assemble: non-positive pivot, system is not positive definite");
    } else {
        factor_->direct = false;
        factor_->cg.setTolerance(0.01 * options_.relative_tolerance);
        factor_->cg.setMaxIterations(20 * n_cond);
        factor_->cg.compute(factor_->condensed);
    }
}

double LinearSystem::min_pivot() const
{
    if (!factor_->direct)
        return std::numeric_limits<double>::quiet_NaN();
    return factor_->ldlt.vectorD().minCoeff();
}

Eigen::VectorXd LinearSystem::rhs(const Eigen::VectorXd& I, const SourceTerms* source) const
{
    const int L = electrodes_->size();
    if (I.size() != L)
        throw InvalidArgument("rhs: current vector has " + std::to_string(I.size()) + " entries for " +
                              std::to_string(L) + " electrodes");
    Eigen::VectorXd b = Eigen::VectorXd::Zero(size());
    Eigen::VectorXd electrode_load = I;
    if (source) {
        if (source->interior.size() > 0) {
            if (source->interior.size() != trace_offset())
                throw InvalidArgument("rhs: interior source has the wrong length");
            b.head(trace_offset()) += source->interior;
        }
        if (source->traces.size() > 0) {
            if (source->traces.size() != mesh_->num_edges())
                throw InvalidArgument("rhs: trace source has the wrong length");
            b.segment(trace_offset(), mesh_->num_edges()) += source->traces;
        }
        if (source->electrodes.size() > 0) {
            if (source->electrodes.size() != L)
                throw InvalidArgument("rhs: electrode source has the wrong length");
            electrode_load += source->electrodes;
        }
    }
    b.tail(L - 1) = basis_.transpose() * electrode_load;
    return b;
}

Eigen::VectorXd LinearSystem::solve_once(const Eigen::VectorXd& b) const
{
    const int nt = mesh_->num_triangles();
    const int tb = trace_offset();

    // Condense: r_b = b_b - K0b^T K00^{-1} b_0 element by element.
    Eigen::VectorXd rc = b.tail(size() - tb);
    for (int t = 0; t < nt; ++t) {
        const auto& te = mesh_->triangle_edges[t];
        const Eigen::Vector3d y = coupling_[t].transpose() * (interior_inverse_[t] * b.segment<3>(3 * t));
        for (int k = 0; k < 3; ++k)
            rc[te[k]] -= y[k];
    }

    Eigen::VectorXd xc;
    if (factor_->direct) {
        xc = factor_->ldlt.solve(rc);
    } else {
        xc = factor_->cg.solve(rc);
    }

    Eigen::VectorXd x(size());
    x.tail(size() - tb) = xc;
    for (int t = 0; t < nt; ++t) {
        const auto& te = mesh_->triangle_edges[t];
        const Eigen::Vector3d xb(xc[te[0]], xc[te[1]], xc[te[2]]);
        x.segment<3>(3 * t) = interior_inverse_[t] * (b.segment<3>(3 * t) - coupling_[t] * xb);
    }
    return x;
}

double LinearSystem::relative_residual(const Eigen::VectorXd& x, const Eigen::VectorXd& b) const
{
    const double r = (matrix_ * x - b).norm();
    const double bn = b.norm();
    return bn > 0.0 ? r / bn : r;
}

Eigen::VectorXd LinearSystem::solve(const Eigen::VectorXd& b) const
{
    if (b.size() != size())
        throw InvalidArgument("solve: right-hand side has the wrong length");
    Eigen::VectorXd x = solve_once(b);
    double res = relative_residual(x, b);
    for (int refine = 0; refine < 2 && res > options_.relative_tolerance; ++refine) {
        x += solve_once(b - matrix_ * x);
        res = relative_residual(x, b);
    }
    if (!(res <= options_.relative_tolerance)) {
        std::ostringstream msg;
        msg << "solve: relative residual " << res << " above tolerance " << options_.relative_tolerance;
        throw NumericalError(msg.str());
    }
    return x;
}

ForwardSolution LinearSystem::unpack(const Eigen::VectorXd& x) const
{
    ForwardSolution sol;
    sol.u.interior = x.head(trace_offset());
    sol.u.traces = x.segment(trace_offset(), mesh_->num_edges());
    sol.U = basis_ * x.tail(electrodes_->size() - 1);
    return sol;
}

Eigen::VectorXd pack(const LinearSystem& system, const WgField& u, const Eigen::VectorXd& U)
{
    check_conforms(system.mesh(), u);
    Eigen::VectorXd x(system.size());
    x.head(system.trace_offset()) = u.interior;
    x.segment(system.trace_offset(), system.mesh().num_edges()) = u.traces;
    x.tail(system.electrodes().size() - 1) = system.voltage_basis().transpose() * U;
    return x;
}

LinearSystem assemble(const Mesh& mesh, const ElectrodeModel& electrodes, const ConductivityField& sigma,
                      SolverOptions options)
{
    return LinearSystem(mesh, electrodes, sigma, options);
}

ForwardSolution solve_forward(const LinearSystem& system, const CurrentPattern& pattern, const SourceTerms* source)
{
    return system.unpack(system.solve(system.rhs(pattern.I, source)));
}

Eigen::MatrixXd forward_map(const LinearSystem& system, const std::vector<CurrentPattern>& patterns)
{
    const int K = static_cast<int>(patterns.size());
    Eigen::MatrixXd volts(K, system.electrodes().size());
    parallel_for(K, [&](int k) { volts.row(k) = solve_forward(system, patterns[k]).U.transpose(); });
    return volts;
}

Eigen::MatrixXd forward_map(const Mesh& mesh, const ElectrodeModel& electrodes, const ConductivityField& sigma,
                            const std::vector<CurrentPattern>& patterns)
{
    return forward_map(assemble(mesh, electrodes, sigma), patterns);
}

double energy_pairing(const LinearSystem& system, const ForwardSolution& u, const ForwardSolution& v)
{
    const Eigen::VectorXd xu = pack(system, u.u, u.U);
    const Eigen::VectorXd xv = pack(system, v.u, v.U);
    return xu.dot(system.matrix() * xv);
}

} // namespace wgeit
