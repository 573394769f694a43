// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "wgeit/config.hpp"
#include "wgeit/gradient.hpp"
#include "wgeit/manufactured.hpp"
#include "wgeit/recon.hpp"
#include "wgeit/tv_prox.hpp"

#ifndef WGEIT_CONFIG_DIR
#define WGEIT_CONFIG_DIR "configs"
#endif

using namespace wgeit;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what)
    {
        pass = pass && ok;
        if (!detail.empty())
            detail += "; ";
        detail += what + (ok ? "" : " [violated]");
    }
};

std::string fmt(const char* f, double a)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

Experiment load(const std::string& file)
{
    return experiment_from_config(Config::load(std::string(WGEIT_CONFIG_DIR) + "/" + file));
}

Eigen::VectorXd random_vector(std::mt19937_64& rng, Eigen::Index n, double lo, double hi)
{
    std::uniform_real_distribution<double> d(lo, hi);
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i)
        v[i] = d(rng);
    return v;
}

Eigen::MatrixXd random_matrix(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c, double lo, double hi)
{
    return random_vector(rng, r * c, lo, hi).reshaped(r, c);
}

// ---------------------------------------------------------------------------

Outcome forward_convergence()
{
    Outcome o;
    const auto t0 = Clock::now();
    const auto rows = convergence_study(bump_solution(), {8, 16, 32, 64, 128});
    const double elapsed = seconds_since(t0);
    const auto& fine = rows.back();
    const auto& h64 = rows[3];
    o.require(fine.order_u >= 1.7 && fine.order_u <= 2.3, "order_u(1/128) = " + fmt("%.4f", fine.order_u));
    o.require(fine.order_U >= 1.7 && fine.order_U <= 2.3, "order_U(1/128) = " + fmt("%.4f", fine.order_U));
    const double ref_u = 8.600e-4, ref_U = 1.933e-4;
    const double fu = std::max(h64.err_u / ref_u, ref_u / h64.err_u);
    const double fU = std::max(h64.err_U / ref_U, ref_U / h64.err_U);
    o.require(fu <= 3.0, "err_u(1/64) = " + fmt("%.3e", h64.err_u) + " vs 8.600e-04 (factor " + fmt("%.1f", fu) + ")");
    o.require(fU <= 3.0, "err_U(1/64) = " + fmt("%.3e", h64.err_U) + " vs 1.933e-04 (factor " + fmt("%.1f", fU) + ")");
    o.require(elapsed <= 120.0, "runtime " + fmt("%.1f s", elapsed));
    return o;
}

Outcome adjoint_gradient()
{
    Outcome o;
    std::mt19937_64 rng(2024);
    const Mesh mesh = build_uniform_mesh(8);
    const ElectrodeModel el = ElectrodeModel::uniform(electrode_layout(mesh));
    const auto patterns = synth_currents(16, 3);
    const ConductivityField sigma(random_vector(rng, mesh.num_triangles(), 0.5, 2.0), 0.25);
    const ConductivityField truth(random_vector(rng, mesh.num_triangles(), 0.5, 2.0), 0.25);
    const Misfit f(mesh, el, patterns, forward_map(mesh, el, truth, patterns));
    const Eigen::VectorXd g = f.value_and_gradient(sigma).gradient;

    // Every component against a central difference with step 1e-5.
    Eigen::VectorXd fd(g.size());
    for (int t = 0; t < g.size(); ++t) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(g.size());
        e[t] = 1.0;
        fd[t] = directional_check(f, sigma, e, {1e-5})[0].fd_value;
    }
    const double rel = (fd - g).norm() / g.norm();
    o.require(rel <= 1e-4, "|g_fd - g| / |g| = " + fmt("%.2e", rel));

    Eigen::VectorXd d = random_vector(rng, g.size(), -1.0, 1.0);
    d /= d.norm();
    std::vector<double> steps;
    for (int i = 1; i <= 6; ++i)
        steps.push_back(0.4 * std::ldexp(1.0, -i));
    const double slope = loglog_slope(directional_check(f, sigma, d, steps));
    o.require(std::abs(slope - 2.0) <= 0.2, "FD sweep slope = " + fmt("%.3f", slope));
    return o;
}

Outcome tv_machinery()
{
    Outcome o;
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> size(1, 16);

    double worst_adj = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const int m = std::max(2, size(rng)), n = 2 * std::max(1, size(rng) / 2);
        const CellGrid x = random_matrix(rng, m, n, -1.0, 1.0);
        const DualPair pq{random_matrix(rng, m - 1, n, -1.0, 1.0), random_matrix(rng, m, n - 1, -1.0, 1.0)};
        const double lhs = (apply_L(pq).array() * x.array()).sum();
        worst_adj = std::max(worst_adj, std::abs(lhs - pq.dot(apply_Lstar(x))));
    }
    o.require(worst_adj <= 1e-12, "(a) max adjointness defect " + fmt("%.1e", worst_adj));

    double worst_lip = 0.0;
    for (double beta : {0.05, 1.0, 3.0}) {
        for (int trial = 0; trial < 200; ++trial) {
            const CellGrid d = random_matrix(rng, 8, 16, 0.0, 5.0);
            const DualPair a{random_matrix(rng, 7, 16, -2, 2), random_matrix(rng, 8, 15, -2, 2)};
            const DualPair b{random_matrix(rng, 7, 16, -2, 2), random_matrix(rng, 8, 15, -2, 2)};
            const DualPair ga = dual_gradient(a, d, beta, 0.25), gb = dual_gradient(b, d, beta, 0.25);
            const DualPair dg{ga.p - gb.p, ga.q - gb.q}, dx{a.p - b.p, a.q - b.q};
            worst_lip = std::max(worst_lip, std::sqrt(dg.squared_norm() / dx.squared_norm()) / (16.0 * beta * beta));
        }
    }
    o.require(worst_lip <= 1.0, "(b) max Lipschitz ratio / 16 beta^2 = " + fmt("%.3f", worst_lip));

    FgpOptions opts;
    opts.max_iter = 500;
    opts.tol = 0.0;
    double worst_gap = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const CellGrid d = random_matrix(rng, 4, 4, 0.0, 5.0);
        const double beta = std::uniform_real_distribution<double>(0.01, 1.0)(rng);
        const FgpResult r = fgp_denoise(d, beta, 0.25, opts);
        worst_gap = std::max(worst_gap, primal_dual_gap(r.dual, d, beta, 0.25));
    }
    o.require(worst_gap <= 1e-6, "(c) max primal-dual gap after 500 iterations " + fmt("%.1e", worst_gap));

    double worst_tv = 0.0;
    for (int n : {8, 16, 32}) {
        const Mesh mesh = build_uniform_mesh(n);
        const Eigen::VectorXd v = random_vector(rng, mesh.num_triangles(), 0.25, 4.0);
        const double edge_sum = tv_norm(mesh, v);
        worst_tv = std::max(worst_tv, std::abs(mesh.h * tv_grid(field_to_grid(mesh, v)) - edge_sum) / edge_sum);
    }
    o.require(worst_tv <= 1e-14, "(d) grid vs edge-sum TV relative difference " + fmt("%.1e", worst_tv));
    return o;
}

Outcome fista_certificate()
{
    Outcome o;
    std::mt19937_64 rng(11);
    const CellGrid c = random_matrix(rng, 4, 8, -1.0, 6.0);
    SmoothObjective f;
    f.value = [&](const CellGrid& x) { return (x - c).squaredNorm(); };
    f.value_and_gradient = [&](const CellGrid& x) { return std::make_pair((x - c).squaredNorm(), CellGrid(2.0 * (x - c))); };
    FistaOptions opts;
    opts.max_iter = 100;
    opts.delta = 0.0;
    const FistaResult toy = fista_minimize(f, TvPenalty{0.0, 1.0, 0.25}, CellGrid::Constant(4, 8, 1.0), opts);
    const double dist = (toy.x - project_C(c, 0.25)).cwiseAbs().maxCoeff();
    o.require(dist <= 1e-10, "projection toy |x - P_C(c)|_inf = " + fmt("%.1e", dist) + " after " +
                                 std::to_string(toy.history.size()) + " iterations");

    // Certificate on the toy and on a short EIT reconstruction with TV.
    int steps = 0, violations = 0;
    auto audit = [&](const std::vector<FistaIteration>& history) {
        for (const auto& it : history) {
            ++steps;
            violations += !(it.F <= it.model);
        }
    };
    audit(toy.history);
    Experiment e = load("example2.cfg");
    e.schedule = {{16, 40}};
    e.n_data = 32;
    for (const auto& lv : reconstruct(e).levels)
        audit(lv.fista.history);
    o.require(violations == 0, "F(x_k) <= Q_L(x_k, y_k) on " + std::to_string(steps) + " accepted steps (" +
                                   std::to_string(violations) + " violations)");
    return o;
}

Outcome example2()
{
    Outcome o;
    const auto t0 = Clock::now();
    for (const char* file : {"example2.cfg", "example2_noisy.cfg"}) {
        const Experiment e = load(file);
        const auto r = reconstruct(e);
        std::string errs;
        bool ok = r.levels.size() == 3;
        for (std::size_t l = 0; l < r.levels.size(); ++l) {
            errs += (l ? ", " : "") + fmt("%.4f", r.levels[l].rel_l2_error);
            if (l > 0)
                ok = ok && r.levels[l].rel_l2_error <= 0.8 * r.levels[l - 1].rel_l2_error;
        }
        o.require(ok, "eps=" + fmt("%g", e.epsilon) + " errors h=1/16,1/32,1/64: " + errs);
    }
    const double elapsed = seconds_since(t0);
    o.require(elapsed <= 900.0, "runtime " + fmt("%.1f s", elapsed));
    return o;
}

Outcome example3()
{
    Outcome o;
    for (const char* file : {"example3.cfg", "example3_noisy.cfg"}) {
        const Experiment e = load(file);
        const auto r = reconstruct(e);
        const auto& lv = r.levels.back();
        const Mesh mesh = build_uniform_mesh(lv.n_subdiv);
        const Vec2 c = top_fraction_centroid(mesh, (lv.sigma.array() - e.sigma0).matrix(), 0.1);
        const double dist = (c - Vec2(0.6, 0.6)).norm();
        char buf[128];
        std::snprintf(buf, sizeof buf, "eps=%g centroid (%.3f, %.3f), distance %.3f", e.epsilon, c.x(), c.y(), dist);
        o.require(lv.n_subdiv == 64 && dist <= 0.1, buf);
    }
    return o;
}

Outcome example4()
{
    Outcome o;
    for (auto [file, expected] : {std::pair{"example4_two.cfg", 2}, std::pair{"example4_four.cfg", 4}}) {
        const Experiment e = load(file);
        const auto r = reconstruct(e);
        const auto& lv = r.levels.back();
        const double threshold = e.sigma0 + 0.5 * e.contrast;
        const int comps = count_components(build_uniform_mesh(lv.n_subdiv), lv.sigma, threshold);
        o.require(comps == expected, e.name + ": " + std::to_string(comps) + " components above " +
                                         fmt("%.2f", threshold) + " (max " + fmt("%.3f", lv.sigma.maxCoeff()) + ")");
    }
    return o;
}

Outcome physics()
{
    Outcome o;
    std::mt19937_64 rng(99);
    const Mesh mesh = build_uniform_mesh(32);
    const ElectrodeModel el = ElectrodeModel::uniform(electrode_layout(mesh));
    const LinearSystem sys = assemble(mesh, el, ConductivityField(random_vector(rng, mesh.num_triangles(), 0.5, 2.0), 0.25));

    std::vector<CurrentPattern> patterns;
    for (int k = 0; k < 8; ++k) {
        Eigen::VectorXd I = random_vector(rng, 16, -1.0, 1.0);
        I.array() -= I.mean();
        patterns.emplace_back(I);
    }
    const Eigen::MatrixXd U = forward_map(sys, patterns);
    const double zero_sum = U.rowwise().sum().cwiseAbs().maxCoeff();
    o.require(zero_sum <= 1e-12, "max |sum U| = " + fmt("%.1e", zero_sum));

    double recip = 0.0;
    for (std::size_t a = 0; a < patterns.size(); ++a)
        for (std::size_t b = a + 1; b < patterns.size(); ++b)
            recip = std::max(recip, std::abs(U.row(a).dot(patterns[b].I) - U.row(b).dot(patterns[a].I)) /
                                        (U.row(a).norm() * patterns[b].I.norm()));
    o.require(recip <= 1e-10, "max reciprocity defect " + fmt("%.1e", recip));

    const ForwardSolution zero = solve_forward(sys, CurrentPattern(Eigen::VectorXd::Zero(16)));
    const double mag = std::max({zero.U.cwiseAbs().maxCoeff(), zero.u.interior.cwiseAbs().maxCoeff(),
                                 zero.u.traces.cwiseAbs().maxCoeff()});
    o.require(mag <= 1e-10, "I = 0 gives max |(u, U)| = " + fmt("%.1e", mag));
    return o;
}

} // namespace

int main()
{
    struct Criterion {
        int id;
        const char* name;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {1, "forward convergence (bump, sigma = 1)", forward_convergence},
        {2, "adjoint gradient vs finite differences", adjoint_gradient},
        {3, "TV operators and dual projection", tv_machinery},
        {4, "FISTA descent certificate and projection toy", fista_certificate},
        {5, "linear conductivity: error decay over h = 1/16, 1/32, 1/64", example2},
        {6, "smooth blob localisation at h = 1/64", example3},
        {7, "inclusion topology after coarse-to-fine refinement", example4},
        {8, "physics invariants (zero sum, reciprocity, I = 0)", physics},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto t0 = Clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        failed += !o.pass;
        std::printf("[%s] criterion %d: %s (%.1f s) -- %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, seconds_since(t0),
                    o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
