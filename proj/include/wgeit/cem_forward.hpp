#pragma once

#include <memory>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "wgeit/mesh.hpp"
#include "wgeit/wg_space.hpp"

namespace wgeit {

struct ElectrodeModel {
    ElectrodeMap map;
    Eigen::VectorXd z; // contact impedance per electrode, all positive

    ElectrodeModel(ElectrodeMap map, Eigen::VectorXd z);
    /// All impedances equal to `z`.
    static ElectrodeModel uniform(ElectrodeMap map, double z = 1.0);

    int size() const { return map.num_electrodes; }
};

/// Injected electrode currents; must sum to zero.
struct CurrentPattern {
    Eigen::VectorXd I;

    explicit CurrentPattern(Eigen::VectorXd currents);
};

/// Piecewise-constant conductivity with lambda <= sigma_T <= 1/lambda.
struct ConductivityField {
    Eigen::VectorXd values;
    double lambda = 0.25;

    ConductivityField(Eigen::VectorXd values, double lambda);
    static ConductivityField constant(const Mesh& mesh, double value, double lambda);
    /// Positive values that may leave the box (FISTA extrapolation points);
    /// lambda is widened to contain them.
    static ConductivityField widened(Eigen::VectorXd values, double lambda);
    /// Samples `sigma` at triangle centroids.
    static ConductivityField sample(const Mesh& mesh, const ScalarFunction& sigma, double lambda);

    int size() const { return static_cast<int>(values.size()); }
};

/// Orthonormal basis of the zero-sum subspace of R^L (Helmert vectors),
/// L x (L-1).
Eigen::MatrixXd zero_sum_basis(int num_electrodes);

/// Extra right-hand-side terms for manufactured problems: (f, v0) per
/// interior coefficient, boundary data per trace, and per-electrode terms
/// added to the current vector.
struct SourceTerms {
    Eigen::VectorXd interior;
    Eigen::VectorXd traces;
    Eigen::VectorXd electrodes;
};

struct ForwardSolution {
    WgField u;
    Eigen::VectorXd U; // zero-sum electrode voltages
};

struct SolverOptions {
    // Above this many condensed unknowns fall back to preconditioned CG.
    int direct_max_unknowns = 4'000'000;
    double relative_tolerance = 1e-10;
};

/// The assembled WG system for a_s(sigma; ., .). Unknown layout: all interior
/// coefficients (3 per triangle), then all edge traces, then L-1 voltage
/// coordinates in the zero-sum basis.
///
/// Interior unknowns only couple through the element-local stabilizer block,
/// so the solve eliminates them element by element and factors the Schur
/// complement on traces and voltages once.
///
/// Holds references to the mesh and the electrode model; both must outlive it.
class LinearSystem {
public:
    LinearSystem(const Mesh& mesh, const ElectrodeModel& electrodes, const ConductivityField& sigma,
                 SolverOptions options = {});
    ~LinearSystem();
    LinearSystem(LinearSystem&&) noexcept;
    LinearSystem& operator=(LinearSystem&&) noexcept;

    const Mesh& mesh() const { return *mesh_; }
    const ElectrodeModel& electrodes() const { return *electrodes_; }
    const ConductivityField& sigma() const { return sigma_; }
    const Eigen::MatrixXd& voltage_basis() const { return basis_; }

    /// Full symmetric matrix over all unknowns.
    const Eigen::SparseMatrix<double>& matrix() const { return matrix_; }
    int size() const { return static_cast<int>(matrix_.rows()); }
    int trace_offset() const { return 3 * mesh_->num_triangles(); }
    int voltage_offset() const { return trace_offset() + mesh_->num_edges(); }

    /// Smallest pivot of the LDL^T factorization of the condensed matrix
    /// (positive iff the system is positive definite). NaN when CG is used.
    double min_pivot() const;

    /// Load vector for current pattern `I` plus optional source terms.
    Eigen::VectorXd rhs(const Eigen::VectorXd& I, const SourceTerms* source = nullptr) const;
    /// Solves A x = b, throwing NumericalError if the relative residual stays
    /// above the tolerance.
    Eigen::VectorXd solve(const Eigen::VectorXd& b) const;
    double relative_residual(const Eigen::VectorXd& x, const Eigen::VectorXd& b) const;

    ForwardSolution unpack(const Eigen::VectorXd& x) const;

private:
    struct Factorization;

    const Mesh* mesh_;
    const ElectrodeModel* electrodes_;
    ConductivityField sigma_;
    SolverOptions options_;
    Eigen::MatrixXd basis_;
    Eigen::SparseMatrix<double> matrix_;
    // Per triangle: inverse of the interior block and the interior-trace coupling.
    std::vector<Eigen::Matrix3d> interior_inverse_;
    std::vector<Eigen::Matrix3d> coupling_;
    std::unique_ptr<Factorization> factor_;

    Eigen::VectorXd solve_once(const Eigen::VectorXd& b) const;
};

LinearSystem assemble(const Mesh& mesh, const ElectrodeModel& electrodes, const ConductivityField& sigma,
                      SolverOptions options = {});

ForwardSolution solve_forward(const LinearSystem& system, const CurrentPattern& pattern,
                              const SourceTerms* source = nullptr);

/// Electrode voltages, one row per pattern (K x L). One assembly and
/// factorization, K solves.
Eigen::MatrixXd forward_map(const LinearSystem& system, const std::vector<CurrentPattern>& patterns);
Eigen::MatrixXd forward_map(const Mesh& mesh, const ElectrodeModel& electrodes, const ConductivityField& sigma,
                            const std::vector<CurrentPattern>& patterns);

/// a_s(sigma; u, v) evaluated through the assembled matrix.
double energy_pairing(const LinearSystem& system, const ForwardSolution& u, const ForwardSolution& v);

/// Packs (u, U) into the system's unknown vector (U projected onto the zero-sum basis).
Eigen::VectorXd pack(const LinearSystem& system, const WgField& u, const Eigen::VectorXd& U);

} // namespace wgeit
