#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "wgeit/cem_forward.hpp"
#include "wgeit/config.hpp"
#include "wgeit/fista.hpp"

namespace wgeit {

/// K sinusoidal patterns on L electrodes: sin(2 pi k l / L) for
/// k = 1..ceil(K/2), then cos(2 pi k l / L) for the remaining ones
/// (l = 1..L). Each is centred to zero sum and scaled to unit norm.
std::vector<CurrentPattern> synth_currents(int num_electrodes, int K);

/// Electrode geometry and impedance shared by data generation and inversion.
struct ElectrodeSetup {
    int num_electrodes = 16;
    double length = 0.125;
    double impedance = 1.0;

    ElectrodeModel build(const Mesh& mesh) const;
};

/// Forward data (K x L) for `true_sigma` sampled at the centroids of the
/// n_data x n_data mesh.
Eigen::MatrixXd generate_data(const ScalarFunction& true_sigma, int n_data, const std::vector<CurrentPattern>& patterns,
                              double lambda, const ElectrodeSetup& setup = {});

struct NoisyData {
    Eigen::MatrixXd voltages;
    double epsilon = 0.0;
    std::uint64_t seed = 0;
};

/// U^delta_l = U_l + epsilon * max_j |U_j| * xi_l per row, xi standard
/// normal from a seeded mt19937_64; rows are then re-centred to zero sum.
NoisyData add_noise(const Eigen::MatrixXd& data, double epsilon, std::uint64_t seed);

/// Piecewise-constant injection from a coarse to a nested finer uniform mesh.
Eigen::VectorXd prolong(const Eigen::VectorXd& coarse, const Mesh& coarse_mesh, const Mesh& fine_mesh);
/// Area-weighted average of fine triangles onto the coarse triangle containing them.
Eigen::VectorXd restrict_average(const Eigen::VectorXd& fine, const Mesh& fine_mesh, const Mesh& coarse_mesh);

/// Per-triangle integrals of sigma and sigma^2 used for L2(Omega) errors.
struct ReferenceField {
    Eigen::VectorXd integral;
    Eigen::VectorXd integral_sq;
    double norm_sq = 0.0;

    ReferenceField(const Mesh& mesh, const ScalarFunction& sigma);
    /// |values - sigma|_{L2} / |sigma|_{L2}
    double relative_error(const Mesh& mesh, const Eigen::VectorXd& values) const;
};

/// Connected components (through shared edges) of {T : values_T >= threshold}.
int count_components(const Mesh& mesh, const Eigen::VectorXd& values, double threshold);
/// Area-weighted centroid of the triangles holding the largest `fraction` of values.
Vec2 top_fraction_centroid(const Mesh& mesh, const Eigen::VectorXd& values, double fraction);

struct Level {
    int n_subdiv = 32;
    int iterations = 200;
};

struct Experiment {
    std::string name;
    ScalarFunction true_sigma;
    double sigma0 = 1.0;
    int K = 10;
    double epsilon = 0.0;
    double alpha = 0.0;
    double lambda = 0.25;
    int n_data = 128;
    std::vector<Level> schedule;
    // Start each level from the previous level's result instead of sigma0.
    bool warm_start = false;
    std::uint64_t seed = 0;
    ElectrodeSetup electrodes;
    FistaOptions fista;
    // Inclusion contrast for thresholding (catalog fields with inclusions).
    double contrast = 0.0;
};

/// Named true fields: example2, example3, example4-two, example4-four,
/// homogeneous. Schedule, sigma0 and iteration budgets follow the catalog
/// defaults; alpha is left at zero and must be supplied.
Experiment catalog_experiment(const std::string& id);

/// Reads an experiment from flat config keys (example, alpha, schedule,
/// iters, n_data, lambda, epsilon, seed, K, sigma0, warm_start, L0, eta,
/// fgp_iters, fgp_tol, delta). `alpha` is required.
Experiment experiment_from_config(const Config& cfg);

struct LevelResult {
    int n_subdiv = 0;
    double h = 0.0;
    Eigen::VectorXd sigma;
    double rel_l2_error = 0.0;
    FistaResult fista;
    std::vector<double> error_history; // relative error of every iterate
};

struct ReconstructionResult {
    Eigen::MatrixXd clean_data;
    NoisyData data;
    std::vector<LevelResult> levels;
};

using LevelCallback = std::function<void(int level, const FistaIteration&)>;

/// Data synthesis on the fine mesh, noise, then FISTA on each level of the
/// schedule with g = alpha N_h.
ReconstructionResult reconstruct(const Experiment& experiment, const LevelCallback& on_iteration = {});

} // namespace wgeit
