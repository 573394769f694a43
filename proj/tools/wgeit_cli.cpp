// Command-line front end: converge, forward, synth, denoise, reconstruct, grad-check.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "wgeit/cem_forward.hpp"
#include "wgeit/config.hpp"
#include "wgeit/csv.hpp"
#include "wgeit/error.hpp"
#include "wgeit/gradient.hpp"
#include "wgeit/manufactured.hpp"
#include "wgeit/parallel.hpp"
#include "wgeit/recon.hpp"
#include "wgeit/tv_prox.hpp"
#include "wgeit/version.hpp"

namespace fs = std::filesystem;
using namespace wgeit;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitNumerical = 2;

struct Shared {
    std::string config_path;
    std::string out_dir = "out";
    std::optional<long long> seed;
    int threads = 0;
};

using Clock = std::chrono::steady_clock;

class Run {
public:
    Run(std::string command, const Shared& shared) : command_(std::move(command)), shared_(shared)
    {
        if (!shared.config_path.empty())
            cfg_ = Config::load(shared.config_path);
        if (shared.seed)
            cfg_.set("seed", std::to_string(*shared.seed));
        set_num_threads(shared.threads);
        fs::create_directories(shared.out_dir);
        start_ = Clock::now();
    }

    Config& config() { return cfg_; }

    std::ofstream open(const std::string& name)
    {
        const fs::path path = fs::path(shared_.out_dir) / name;
        std::ofstream os(path);
        if (!os)
            throw UsageError("cannot write '" + path.string() + "'");
        outputs_.push_back(name);
        return os;
    }

    void time(const std::string& phase, double seconds) { timings_[phase] = seconds; }
    void note(const std::string& key, nlohmann::json value) { summary_[key] = std::move(value); }

    void write_manifest(int exit_code)
    {
        nlohmann::json m;
        m["command"] = command_;
        m["version"] = version;
        m["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                     std::to_string(EIGEN_MINOR_VERSION);
        m["compiler"] = __VERSION__;
        m["config_file"] = shared_.config_path;
        m["config"] = cfg_.entries();
        m["threads"] = num_threads();
        m["outputs"] = outputs_;
        m["summary"] = summary_;
        timings_["total"] = std::chrono::duration<double>(Clock::now() - start_).count();
        m["timings_seconds"] = timings_;
        m["exit_code"] = exit_code;
        std::ofstream os(fs::path(shared_.out_dir) / "manifest.json");
        os << m.dump(2) << '\n';
    }

private:
    std::string command_;
    Shared shared_;
    Config cfg_;
    Clock::time_point start_;
    std::vector<std::string> outputs_;
    std::map<std::string, double> timings_;
    nlohmann::json summary_ = nlohmann::json::object();
};

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

ElectrodeSetup electrode_setup(const Config& cfg)
{
    ElectrodeSetup s;
    s.num_electrodes = static_cast<int>(cfg.get_int("electrodes", s.num_electrodes));
    s.length = cfg.get_double("electrode_length", s.length);
    s.impedance = cfg.get_double("impedance", s.impedance);
    return s;
}

// ---------------------------------------------------------------- converge

int run_converge(Run& run)
{
    const Config& cfg = run.config();
    const std::string name = cfg.get("solution", "bump");
    ManufacturedSolution exact = name == "bump" ? bump_solution()
                                 : name == "linear"
                                     ? linear_solution(cfg.get_double("a", 1.0), cfg.get_double("b", 0.5),
                                                       cfg.get_double("c", 0.0))
                                     : throw UsageError("config key 'solution': expected 'bump' or 'linear'");
    const ElectrodeSetup es = electrode_setup(cfg);
    ConvergenceOptions opts;
    opts.num_electrodes = es.num_electrodes;
    opts.electrode_length = es.length;
    opts.contact_impedance = es.impedance;
    opts.lambda = cfg.get_double("lambda", opts.lambda);
    const auto meshes = cfg.get_int_list("meshes", {8, 16, 32, 64, 128});

    const auto t0 = Clock::now();
    const auto rows = convergence_study(exact, meshes, opts);
    run.time("study", seconds_since(t0));
    {
        auto os = run.open("convergence.csv");
        write_convergence_csv(os, rows);
    }
    std::cout << std::scientific << std::setprecision(4);
    std::cout << "       h      err_u  order_u      err_U  order_U\n";
    for (const auto& r : rows)
        std::cout << std::setw(8) << ("1/" + std::to_string(r.n_subdiv)) << ' ' << r.err_u << ' '
                  << std::fixed << std::setw(8) << r.order_u << ' ' << std::scientific << r.err_U << ' '
                  << std::fixed << std::setw(8) << r.order_U << std::scientific << '\n';
    if (rows.size() < 2)
        return 0;
    const auto& last = rows.back();
    run.note("finest_order_u", last.order_u);
    run.note("finest_order_U", last.order_U);
    const double lo = cfg.get_double("min_order", 1.7), hi = cfg.get_double("max_order", 2.3);
    bool ok = true;
    for (auto [label, order] : {std::pair{"u", last.order_u}, std::pair{"U", last.order_U}}) {
        if (!(order >= lo && order <= hi)) {
            std::cerr << "error: finest observed order for " << label << " is " << order << ", outside [" << lo
                      << ", " << hi << "]\n";
            ok = false;
        }
    }
    return ok ? 0 : kExitNumerical;
}

// ----------------------------------------------------------------- forward

int run_forward(Run& run)
{
    const Config& cfg = run.config();
    const int n = static_cast<int>(cfg.get_int("n", 32));
    const double lambda = cfg.get_double("lambda", 0.25);
    const Mesh mesh = build_uniform_mesh(n);
    const ElectrodeSetup es = electrode_setup(cfg);
    const ElectrodeModel electrodes = es.build(mesh);
    const ConductivityField sigma =
        cfg.has("example") ? ConductivityField::sample(mesh, catalog_experiment(cfg.get("example", "")).true_sigma,
                                                       lambda)
                           : ConductivityField::constant(mesh, cfg.get_double("sigma", 1.0), lambda);
    const auto patterns = synth_currents(es.num_electrodes, static_cast<int>(cfg.get_int("K", 10)));

    const auto t0 = Clock::now();
    const LinearSystem system = assemble(mesh, electrodes, sigma);
    run.time("assemble", seconds_since(t0));
    const auto t1 = Clock::now();
    const Eigen::MatrixXd U = forward_map(system, patterns);
    const ForwardSolution first = solve_forward(system, patterns.front());
    run.time("solve", seconds_since(t1));

    {
        auto os = run.open("voltages.csv");
        csv::write_matrix(os, U);
    }
    {
        auto os = run.open("potential_pattern0.csv");
        csv::write_interior_field(os, mesh, first.u);
    }
    {
        auto os = run.open("sigma.csv");
        csv::write_triangle_field(os, sigma.values);
    }
    {
        auto os = run.open("mesh.txt");
        write_mesh(os, mesh, electrodes.map);
    }
    run.note("unknowns", system.size());
    std::cout << "solved " << patterns.size() << " patterns on h=1/" << n << " (" << system.size()
              << " unknowns)\n";
    return 0;
}

// ------------------------------------------------------------------- synth

int run_synth(Run& run)
{
    const Config& cfg = run.config();
    const Experiment e = catalog_experiment(cfg.require("example"));
    const ElectrodeSetup es = electrode_setup(cfg);
    const int n_data = static_cast<int>(cfg.get_int("n_data", e.n_data));
    const auto patterns = synth_currents(es.num_electrodes, static_cast<int>(cfg.get_int("K", e.K)));
    const auto t0 = Clock::now();
    const Eigen::MatrixXd clean = generate_data(e.true_sigma, n_data, patterns, cfg.get_double("lambda", e.lambda), es);
    run.time("forward", seconds_since(t0));
    const NoisyData noisy = add_noise(clean, cfg.get_double("epsilon", 0.0),
                                      static_cast<std::uint64_t>(cfg.get_int("seed", 0)));
    {
        auto os = run.open("data.csv");
        csv::write_matrix(os, noisy.voltages);
    }
    {
        auto os = run.open("clean_data.csv");
        csv::write_matrix(os, clean);
    }
    {
        Eigen::MatrixXd I(patterns.size(), es.num_electrodes);
        for (std::size_t k = 0; k < patterns.size(); ++k)
            I.row(k) = patterns[k].I.transpose();
        auto os = run.open("currents.csv");
        csv::write_matrix(os, I);
    }
    std::cout << "wrote " << noisy.voltages.rows() << "x" << noisy.voltages.cols() << " data (epsilon "
              << noisy.epsilon << ")\n";
    return 0;
}

// ----------------------------------------------------------------- denoise

int run_denoise(Run& run)
{
    const Config& cfg = run.config();
    const double beta = cfg.require_double("beta");
    const double lambda = cfg.get_double("lambda", 0.25);
    FgpOptions opts;
    opts.max_iter = static_cast<int>(cfg.get_int("fgp_iters", opts.max_iter));
    opts.tol = cfg.get_double("fgp_tol", opts.tol);

    CellGrid d;
    if (cfg.has("input")) {
        std::ifstream in(cfg.get("input", ""));
        if (!in)
            throw UsageError("cannot open input grid '" + cfg.get("input", "") + "'");
        d = csv::read_matrix(in);
    } else {
        // Synthetic input: catalog field on an n x n mesh plus Gaussian noise.
        const int n = static_cast<int>(cfg.get_int("n", 32));
        const Mesh mesh = build_uniform_mesh(n);
        const auto field = ConductivityField::sample(mesh, catalog_experiment(cfg.require("example")).true_sigma,
                                                     lambda);
        d = field_to_grid(mesh, field.values);
        std::mt19937_64 rng(static_cast<std::uint64_t>(cfg.get_int("seed", 0)));
        std::normal_distribution<double> xi(0.0, cfg.get_double("noise", 0.1));
        for (Eigen::Index i = 0; i < d.size(); ++i)
            d.data()[i] += xi(rng);
    }
    const auto t0 = Clock::now();
    const FgpResult r = fgp_denoise(d, beta, lambda, opts);
    run.time("fgp", seconds_since(t0));
    const double gap = primal_dual_gap(r.dual, d, beta, lambda);
    {
        auto os = run.open("input.csv");
        csv::write_matrix(os, d);
    }
    {
        auto os = run.open("denoised.csv");
        csv::write_matrix(os, r.x);
    }
    run.note("iterations", r.iterations);
    run.note("primal_dual_gap", gap);
    std::cout << "fgp: " << r.iterations << " iterations, primal-dual gap " << gap << '\n';
    return 0;
}

// ------------------------------------------------------------- reconstruct

int run_reconstruct(Run& run)
{
    const Experiment e = experiment_from_config(run.config());
    auto log = run.open("fista_log.csv");
    log << "level,k,F,f,g,L_k,backtracks\n" << std::setprecision(12);
    const auto t0 = Clock::now();
    const ReconstructionResult r = reconstruct(e, [&](int level, const FistaIteration& it) {
        log << level << ',' << it.k << ',' << it.F << ',' << it.f << ',' << it.g << ',' << it.L << ','
            << it.backtracks << '\n';
    });
    run.time("reconstruct", seconds_since(t0));

    {
        auto os = run.open("data.csv");
        csv::write_matrix(os, r.data.voltages);
    }
    {
        auto os = run.open("error_history.csv");
        os << "level,h,iter,F,rel_l2_err\n" << std::setprecision(12);
        for (std::size_t l = 0; l < r.levels.size(); ++l) {
            const auto& lv = r.levels[l];
            for (std::size_t i = 0; i < lv.error_history.size(); ++i) {
                // Row 0 is the starting guess, which has no F value logged.
                os << l << ',' << lv.h << ',' << i << ',';
                if (i > 0)
                    os << lv.fista.history[i - 1].F;
                os << ',' << lv.error_history[i] << '\n';
            }
        }
    }
    nlohmann::json levels = nlohmann::json::array();
    for (std::size_t l = 0; l < r.levels.size(); ++l) {
        const auto& lv = r.levels[l];
        auto os = run.open("sigma_level" + std::to_string(l) + "_n" + std::to_string(lv.n_subdiv) + ".csv");
        csv::write_triangle_field(os, lv.sigma);
        levels.push_back({{"n", lv.n_subdiv}, {"rel_l2_err", lv.rel_l2_error}, {"F", lv.fista.F},
                          {"iterations", lv.fista.history.size()}});
        std::cout << "level " << l << " h=1/" << lv.n_subdiv << ": rel L2 error " << lv.rel_l2_error << ", F "
                  << lv.fista.F << '\n';
    }
    run.note("levels", levels);
    return 0;
}

// -------------------------------------------------------------- grad-check

int run_grad_check(Run& run)
{
    const Config& cfg = run.config();
    const int n = static_cast<int>(cfg.get_int("n", 8));
    const Mesh mesh = build_uniform_mesh(n);
    const ElectrodeSetup es = electrode_setup(cfg);
    const ElectrodeModel electrodes = es.build(mesh);
    const auto patterns = synth_currents(es.num_electrodes, static_cast<int>(cfg.get_int("K", 3)));
    const double lo = cfg.get_double("sigma_min", 0.5), hi = cfg.get_double("sigma_max", 2.0);
    const double lambda = cfg.get_double("lambda", 0.25);

    std::mt19937_64 rng(static_cast<std::uint64_t>(cfg.get_int("seed", 0)));
    std::uniform_real_distribution<double> box(lo, hi), dir(-1.0, 1.0);
    const int nt = mesh.num_triangles();
    Eigen::VectorXd sigma(nt), truth(nt), direction(nt);
    for (int t = 0; t < nt; ++t) {
        sigma[t] = box(rng);
        truth[t] = box(rng);
        direction[t] = dir(rng);
    }
    direction *= 0.25 * lo / direction.cwiseAbs().maxCoeff();
    const Eigen::MatrixXd data = forward_map(mesh, electrodes, ConductivityField(truth, lambda), patterns);
    const Misfit misfit(mesh, electrodes, patterns, data);

    std::vector<double> steps;
    for (int i = 0; i < static_cast<int>(cfg.get_int("steps", 8)); ++i)
        steps.push_back(std::ldexp(1.0, -i));
    const auto t0 = Clock::now();
    const auto samples = directional_check(misfit, ConductivityField(sigma, lambda), direction, steps);
    run.time("check", seconds_since(t0));
    const double slope = loglog_slope(samples);
    {
        auto os = run.open("grad_check.csv");
        os << "t,fd_value,analytic_value,rel_err\n" << std::setprecision(17);
        for (const auto& s : samples)
            os << s.t << ',' << s.fd_value << ',' << s.analytic_value << ',' << s.rel_err << '\n';
    }
    run.note("slope", slope);
    run.note("min_rel_err", samples.back().rel_err);
    std::cout << "FD log-log slope " << slope << ", rel. error at t=" << samples.back().t << ": "
              << samples.back().rel_err << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Weak Galerkin EIT solver and TV-regularized reconstruction"};
    app.set_version_flag("--version", std::string(version));
    app.require_subcommand(1);

    Shared shared;
    struct Command {
        const char* name;
        const char* help;
        int (*fn)(Run&);
    };
    const Command commands[] = {
        {"converge", "Forward convergence study on a manufactured solution", run_converge},
        {"forward", "Forward solve for sinusoidal current patterns", run_forward},
        {"synth", "Synthesize (noisy) electrode data for a catalog conductivity", run_synth},
        {"denoise", "TV denoising with the box-constrained dual projection method", run_denoise},
        {"reconstruct", "TV-regularized FISTA reconstruction", run_reconstruct},
        {"grad-check", "Compare the adjoint gradient against central differences", run_grad_check},
    };
    std::vector<std::pair<CLI::App*, const Command*>> subs;
    for (const auto& c : commands) {
        CLI::App* sub = app.add_subcommand(c.name, c.help);
        sub->add_option("--config", shared.config_path, "Flat key = value config file");
        sub->add_option("--out", shared.out_dir, "Output directory")->capture_default_str();
        sub->add_option("--seed", shared.seed, "Overrides the config seed");
        sub->add_option("--threads", shared.threads, "Worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
        subs.emplace_back(sub, &c);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    for (auto [sub, cmd] : subs) {
        if (!sub->parsed())
            continue;
        std::optional<Run> run;
        int code = 0;
        try {
            run.emplace(cmd->name, shared);
            code = cmd->fn(*run);
        } catch (const NumericalError& e) {
            std::cerr << "numerical error: " << e.what() << '\n';
            code = kExitNumerical;
        } catch (const InvalidArgument& e) {
            std::cerr << "usage error: " << e.what() << '\n';
            code = kExitUsage;
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << '\n';
            code = kExitNumerical;
        }
        if (run)
            run->write_manifest(code);
        return code;
    }
    return kExitUsage;
}
