#include "wgeit/recon.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "wgeit/error.hpp"
#include "wgeit/gradient.hpp"
#include "wgeit/quadrature.hpp"

namespace wgeit {

std::vector<CurrentPattern> synth_currents(int num_electrodes, int K)
{
    if (num_electrodes < 2)
        throw InvalidArgument("synth_currents: need at least 2 electrodes");
    if (K < 1 || K > num_electrodes - 1)
        throw InvalidArgument("synth_currents: K = " + std::to_string(K) + " must lie in [1, " +
                              std::to_string(num_electrodes - 1) + "]");
    const int n_sin = (K + 1) / 2;
    std::vector<CurrentPattern> out;
    out.reserve(K);
    for (int j = 0; j < K; ++j) {
        const bool sine = j < n_sin;
        const int k = sine ? j + 1 : j - n_sin + 1;
        Eigen::VectorXd I(num_electrodes);
        for (int l = 1; l <= num_electrodes; ++l) {
            const double arg = 2.0 * std::numbers::pi * k * l / num_electrodes;
            I[l - 1] = sine ? std::sin(arg) : std::cos(arg);
        }
        I.array() -= I.mean();
        const double norm = I.norm();
        if (norm < 1e-8)
            throw InvalidArgument("synth_currents: pattern " + std::string(sine ? "sin" : "cos") + " k=" +
                                  std::to_string(k) + " vanishes on " + std::to_string(num_electrodes) +
                                  " electrodes; choose a smaller K");
        out.emplace_back(I / norm);
    }
    return out;
}

ElectrodeModel ElectrodeSetup::build(const Mesh& mesh) const
{
    return ElectrodeModel::uniform(electrode_layout(mesh, num_electrodes, length), impedance);
}

Eigen::MatrixXd generate_data(const ScalarFunction& true_sigma, int n_data, const std::vector<CurrentPattern>& patterns,
                              double lambda, const ElectrodeSetup& setup)
{
    const Mesh mesh = build_uniform_mesh(n_data);
    const ElectrodeModel electrodes = setup.build(mesh);
    const ConductivityField sigma = ConductivityField::sample(mesh, true_sigma, lambda);
    return forward_map(mesh, electrodes, sigma, patterns);
}

NoisyData add_noise(const Eigen::MatrixXd& data, double epsilon, std::uint64_t seed)
{
    if (!(epsilon >= 0.0))
        throw InvalidArgument("add_noise: epsilon must be non-negative");
    NoisyData out{data, epsilon, seed};
    if (epsilon == 0.0)
        return out;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> xi(0.0, 1.0);
    for (Eigen::Index k = 0; k < data.rows(); ++k) {
        const double scale = epsilon * data.row(k).cwiseAbs().maxCoeff();
        for (Eigen::Index l = 0; l < data.cols(); ++l)
            out.voltages(k, l) += scale * xi(rng);
        out.voltages.row(k).array() -= out.voltages.row(k).mean();
    }
    return out;
}

namespace {

// Coarse triangle containing point p of a uniform mesh with n subdivisions.
int locate(const Mesh& coarse, const Vec2& p)
{
    const int n = coarse.n_subdiv;
    const double hc = 1.0 / n;
    const int c = std::clamp(static_cast<int>(std::floor(p.x() / hc)), 0, n - 1);
    const int r = std::clamp(static_cast<int>(std::floor(p.y() / hc)), 0, n - 1);
    const double lx = p.x() / hc - c;
    const double ly = p.y() / hc - r;
    const int cell = r * n + c;
    return ly > lx ? 2 * cell + 1 : 2 * cell;
}

void check_nested(const Mesh& coarse, const Mesh& fine, const char* who)
{
    if (fine.n_subdiv < coarse.n_subdiv || fine.n_subdiv % coarse.n_subdiv != 0)
        throw InvalidArgument(std::string(who) + ": mesh with n=" + std::to_string(fine.n_subdiv) +
                              " is not a nested refinement of n=" + std::to_string(coarse.n_subdiv));
}

} // namespace

Eigen::VectorXd prolong(const Eigen::VectorXd& coarse, const Mesh& coarse_mesh, const Mesh& fine_mesh)
{
    check_nested(coarse_mesh, fine_mesh, "prolong");
    if (coarse.size() != coarse_mesh.num_triangles())
        throw InvalidArgument("prolong: field size does not match the coarse mesh");
    Eigen::VectorXd fine(fine_mesh.num_triangles());
    for (int t = 0; t < fine_mesh.num_triangles(); ++t)
        fine[t] = coarse[locate(coarse_mesh, fine_mesh.centroid(t))];
    return fine;
}

Eigen::VectorXd restrict_average(const Eigen::VectorXd& fine, const Mesh& fine_mesh, const Mesh& coarse_mesh)
{
    check_nested(coarse_mesh, fine_mesh, "restrict_average");
    if (fine.size() != fine_mesh.num_triangles())
        throw InvalidArgument("restrict_average: field size does not match the fine mesh");
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(coarse_mesh.num_triangles());
    Eigen::VectorXd area = Eigen::VectorXd::Zero(coarse_mesh.num_triangles());
    for (int t = 0; t < fine_mesh.num_triangles(); ++t) {
        const int c = locate(coarse_mesh, fine_mesh.centroid(t));
        sum[c] += fine_mesh.areas[t] * fine[t];
        area[c] += fine_mesh.areas[t];
    }
    return sum.cwiseQuotient(area);
}

ReferenceField::ReferenceField(const Mesh& mesh, const ScalarFunction& sigma)
    : integral(mesh.num_triangles()), integral_sq(mesh.num_triangles())
{
    const auto rule = quadrature::triangle_degree6();
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const auto& tri = mesh.triangles[t];
        double s = 0.0, s2 = 0.0;
        for (const auto& q : rule) {
            const Vec2 p = q.bary[0] * mesh.vertices[tri[0]] + q.bary[1] * mesh.vertices[tri[1]] +
                           q.bary[2] * mesh.vertices[tri[2]];
            const double v = sigma(p);
            s += q.weight * v;
            s2 += q.weight * v * v;
        }
        integral[t] = mesh.areas[t] * s;
        integral_sq[t] = mesh.areas[t] * s2;
    }
    norm_sq = integral_sq.sum();
}

double ReferenceField::relative_error(const Mesh& mesh, const Eigen::VectorXd& values) const
{
    if (values.size() != integral.size())
        throw InvalidArgument("relative_error: field size does not match the mesh");
    double err = 0.0;
    for (int t = 0; t < mesh.num_triangles(); ++t)
        err += mesh.areas[t] * values[t] * values[t] - 2.0 * values[t] * integral[t] + integral_sq[t];
    return std::sqrt(std::max(err, 0.0) / norm_sq);
}

int count_components(const Mesh& mesh, const Eigen::VectorXd& values, double threshold)
{
    const int nt = mesh.num_triangles();
    std::vector<int> label(nt, -1);
    int count = 0;
    std::vector<int> stack;
    for (int s = 0; s < nt; ++s) {
        if (label[s] >= 0 || values[s] < threshold)
            continue;
        label[s] = count;
        stack.push_back(s);
        while (!stack.empty()) {
            const int t = stack.back();
            stack.pop_back();
            for (int k = 0; k < 3; ++k) {
                const int nb = mesh.neighbour(t, k);
                if (nb >= 0 && label[nb] < 0 && values[nb] >= threshold) {
                    label[nb] = count;
                    stack.push_back(nb);
                }
            }
        }
        ++count;
    }
    return count;
}

Vec2 top_fraction_centroid(const Mesh& mesh, const Eigen::VectorXd& values, double fraction)
{
    if (!(fraction > 0.0 && fraction <= 1.0))
        throw InvalidArgument("top_fraction_centroid: fraction must lie in (0, 1]");
    std::vector<int> order(mesh.num_triangles());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return values[a] > values[b]; });
    const int count = std::max(1, static_cast<int>(std::ceil(fraction * order.size())));
    Vec2 c = Vec2::Zero();
    double area = 0.0;
    for (int i = 0; i < count; ++i) {
        c += mesh.areas[order[i]] * mesh.centroid(order[i]);
        area += mesh.areas[order[i]];
    }
    return c / area;
}

namespace {

double square_inclusions(const Vec2& p, const std::vector<std::array<double, 4>>& boxes, double background,
                         double inclusion)
{
    for (const auto& b : boxes)
        if (p.x() >= b[0] && p.x() <= b[1] && p.y() >= b[2] && p.y() <= b[3])
            return inclusion;
    return background;
}

} // namespace

Experiment catalog_experiment(const std::string& id)
{
    Experiment e;
    e.name = id;
    e.schedule = {{32, 200}};
    if (id == "example2") {
        e.true_sigma = [](const Vec2& p) { return 0.5 + 2.0 / 3.0 * p.x(); };
        e.sigma0 = 0.5;
        e.schedule = {{16, 200}, {32, 200}, {64, 200}};
    } else if (id == "example3") {
        e.true_sigma = [](const Vec2& p) {
            const double dx = p.x() - 0.6, dy = p.y() - 0.6;
            return 1.0 + 0.2 * std::exp(-8.0 * (dx * dx + dy * dy));
        };
        e.sigma0 = 1.0;
        e.schedule = {{64, 200}};
    } else if (id == "example4-two") {
        // Stand-in: two square inclusions of conductivity 2 on background 1.
        const std::vector<std::array<double, 4>> boxes{{0.125, 0.375, 0.375, 0.625},
                                                       {0.625, 0.875, 0.375, 0.625}};
        e.true_sigma = [boxes](const Vec2& p) { return square_inclusions(p, boxes, 1.0, 2.0); };
        e.sigma0 = 1.0;
        e.contrast = 1.0;
        e.schedule = {{32, 200}, {64, 80}};
        e.warm_start = true;
    } else if (id == "example4-four") {
        const std::vector<std::array<double, 4>> boxes{{0.125, 0.375, 0.125, 0.375},
                                                       {0.625, 0.875, 0.125, 0.375},
                                                       {0.125, 0.375, 0.625, 0.875},
                                                       {0.625, 0.875, 0.625, 0.875}};
        e.true_sigma = [boxes](const Vec2& p) { return square_inclusions(p, boxes, 1.0, 2.0); };
        e.sigma0 = 1.0;
        e.contrast = 1.0;
        e.schedule = {{32, 200}, {64, 80}};
        e.warm_start = true;
    } else if (id == "homogeneous") {
        e.true_sigma = [](const Vec2&) { return 1.0; };
        e.sigma0 = 1.0;
    } else {
        throw UsageError("unknown example '" + id +
                         "' (expected example2, example3, example4-two, example4-four or homogeneous)");
    }
    return e;
}

Experiment experiment_from_config(const Config& cfg)
{
    Experiment e = catalog_experiment(cfg.require("example"));
    e.alpha = cfg.require_double("alpha");
    if (!(e.alpha >= 0.0))
        throw UsageError("config key 'alpha' must be non-negative");
    e.n_data = static_cast<int>(cfg.get_int("n_data", e.n_data));
    e.lambda = cfg.get_double("lambda", e.lambda);
    e.epsilon = cfg.get_double("epsilon", e.epsilon);
    e.seed = static_cast<std::uint64_t>(cfg.get_int("seed", static_cast<long long>(e.seed)));
    e.K = static_cast<int>(cfg.get_int("K", e.K));
    e.sigma0 = cfg.get_double("sigma0", e.sigma0);
    e.warm_start = cfg.get_bool("warm_start", e.warm_start);
    e.fista.L0 = cfg.get_double("L0", e.fista.L0);
    e.fista.eta = cfg.get_double("eta", e.fista.eta);
    e.fista.delta = cfg.get_double("delta", e.fista.delta);
    e.fista.inner.max_iter = static_cast<int>(cfg.get_int("fgp_iters", e.fista.inner.max_iter));
    e.fista.inner.tol = cfg.get_double("fgp_tol", e.fista.inner.tol);
    e.electrodes.impedance = cfg.get_double("impedance", e.electrodes.impedance);

    std::vector<int> meshes;
    for (const auto& l : e.schedule)
        meshes.push_back(l.n_subdiv);
    meshes = cfg.get_int_list("schedule", meshes);
    std::vector<int> iters;
    for (const auto& l : e.schedule)
        iters.push_back(l.iterations);
    iters = cfg.get_int_list("iters", iters);
    if (iters.size() == 1)
        iters.resize(meshes.size(), iters.front());
    if (iters.size() != meshes.size())
        throw UsageError("config keys 'schedule' and 'iters' have different lengths");
    e.schedule.clear();
    for (std::size_t i = 0; i < meshes.size(); ++i)
        e.schedule.push_back({meshes[i], iters[i]});
    return e;
}

namespace {

void validate(const Experiment& e)
{
    if (!e.true_sigma)
        throw InvalidArgument("experiment '" + e.name + "': no true conductivity");
    if (e.schedule.empty())
        throw InvalidArgument("experiment '" + e.name + "': empty mesh schedule");
    if (!(e.lambda > 0.0 && e.lambda < 1.0))
        throw InvalidArgument("experiment: lambda must lie in (0, 1)");
    if (e.sigma0 < e.lambda || e.sigma0 > 1.0 / e.lambda)
        throw InvalidArgument("experiment: sigma0 lies outside [lambda, 1/lambda]");
    for (const auto& l : e.schedule) {
        if (l.n_subdiv >= e.n_data)
            throw InvalidArgument("experiment: data mesh n=" + std::to_string(e.n_data) +
                                  " must be strictly finer than reconstruction mesh n=" + std::to_string(l.n_subdiv));
        if (l.iterations < 0)
            throw InvalidArgument("experiment: negative iteration budget");
    }
}

} // namespace

ReconstructionResult reconstruct(const Experiment& experiment, const LevelCallback& on_iteration)
{
    validate(experiment);
    const auto patterns = synth_currents(experiment.electrodes.num_electrodes, experiment.K);

    ReconstructionResult result;
    result.clean_data =
        generate_data(experiment.true_sigma, experiment.n_data, patterns, experiment.lambda, experiment.electrodes);
    result.data = add_noise(result.clean_data, experiment.epsilon, experiment.seed);

    const double lo = 0.5 * experiment.lambda;
    const double hi = 2.0 / experiment.lambda;

    Mesh previous_mesh;
    Eigen::VectorXd previous;
    for (std::size_t level = 0; level < experiment.schedule.size(); ++level) {
        const Level& stage = experiment.schedule[level];
        const Mesh mesh = build_uniform_mesh(stage.n_subdiv);
        const ElectrodeModel electrodes = experiment.electrodes.build(mesh);
        const Misfit misfit(mesh, electrodes, patterns, result.data.voltages);
        const ReferenceField reference(mesh, experiment.true_sigma);

        // Extrapolated FISTA points may leave the box; f is evaluated at
        // their clamp to [lambda/2, 2/lambda].
        auto field_at = [&](const CellGrid& y) {
            return ConductivityField::widened(grid_to_field(mesh, y).cwiseMax(lo).cwiseMin(hi), experiment.lambda);
        };
        SmoothObjective objective;
        objective.value = [&](const CellGrid& y) { return misfit.value(field_at(y)); };
        objective.value_and_gradient = [&](const CellGrid& y) {
            auto vg = misfit.value_and_gradient(field_at(y));
            return std::make_pair(vg.value, field_to_grid(mesh, vg.gradient));
        };

        Eigen::VectorXd start;
        if (experiment.warm_start && level > 0)
            start = prolong(previous, previous_mesh, mesh);
        else
            start = Eigen::VectorXd::Constant(mesh.num_triangles(), experiment.sigma0);

        const TvPenalty penalty{experiment.alpha, mesh.h, experiment.lambda};
        FistaOptions options = experiment.fista;
        options.max_iter = stage.iterations;

        LevelResult out;
        out.n_subdiv = stage.n_subdiv;
        out.h = mesh.h;
        out.error_history.push_back(reference.relative_error(mesh, start));
        auto callback = [&](const FistaIteration& it, const CellGrid& x) {
            out.error_history.push_back(reference.relative_error(mesh, grid_to_field(mesh, x)));
            if (on_iteration)
                on_iteration(static_cast<int>(level), it);
        };
        out.fista = fista_minimize(objective, penalty, field_to_grid(mesh, start), options, callback);
        out.sigma = grid_to_field(mesh, out.fista.x);
        out.rel_l2_error = reference.relative_error(mesh, out.sigma);

        previous = out.sigma;
        previous_mesh = mesh;
        result.levels.push_back(std::move(out));
    }
    return result;
}

} // namespace wgeit
