#include <doctest.h>

#include <random>

#include <Eigen/Dense>

#include "helpers.hpp"
#include "wgeit/error.hpp"
#include "wgeit/gradient.hpp"
#include "wgeit/recon.hpp"

using namespace wgeit;

namespace {

struct Problem {
    Mesh mesh = build_uniform_mesh(8);
    ElectrodeModel electrodes = ElectrodeModel::uniform(electrode_layout(mesh));
    std::vector<CurrentPattern> patterns = synth_currents(16, 3);
    Eigen::VectorXd sigma;
    Eigen::MatrixXd data;

    explicit Problem(std::uint64_t seed)
    {
        std::mt19937_64 rng(seed);
        sigma = test::uniform_vector(rng, mesh.num_triangles(), 0.5, 2.0);
        const Eigen::VectorXd truth = test::uniform_vector(rng, mesh.num_triangles(), 0.5, 2.0);
        data = forward_map(mesh, electrodes, ConductivityField(truth, 0.25), patterns);
    }
};

} // namespace

TEST_SUITE("gradient")
{
    TEST_CASE("adjoint solve: zero residual and linearity")
    {
        Problem p(1);
        const LinearSystem sys = assemble(p.mesh, p.electrodes, ConductivityField(p.sigma, 0.25));
        const AdjointSolution z0 = solve_adjoint(sys, Eigen::VectorXd::Zero(16));
        CHECK(z0.Z.cwiseAbs().maxCoeff() == 0.0);
        Eigen::VectorXd r = p.data.row(0).transpose();
        const AdjointSolution a = solve_adjoint(sys, r), b = solve_adjoint(sys, 2.0 * r);
        CHECK((b.Z - 2.0 * a.Z).norm() < 1e-12 * b.Z.norm());
        CHECK((b.z.interior - 2.0 * a.z.interior).norm() < 1e-12 * b.z.interior.norm());
    }

    TEST_CASE("exact data gives a zero misfit and gradient")
    {
        Problem p(2);
        const ConductivityField sigma(p.sigma, 0.25);
        const Misfit f(p.mesh, p.electrodes, p.patterns, forward_map(p.mesh, p.electrodes, sigma, p.patterns));
        const auto vg = f.value_and_gradient(sigma);
        CHECK(vg.value < 1e-24);
        CHECK(vg.gradient.cwiseAbs().maxCoeff() < 1e-12);
    }

    TEST_CASE("gradient matches central differences per component")
    {
        Problem p(3);
        const ConductivityField sigma(p.sigma, 0.25);
        const Misfit f(p.mesh, p.electrodes, p.patterns, p.data);
        const Eigen::VectorXd g = f.value_and_gradient(sigma).gradient;
        const double t = 1e-5;
        for (int T : {0, 17, 63, 100, 127}) {
            Eigen::VectorXd e = Eigen::VectorXd::Zero(p.mesh.num_triangles());
            e[T] = 1.0;
            const auto s = directional_check(f, sigma, e, {t});
            CHECK(s[0].rel_err <= 1e-4);
            CHECK(s[0].analytic_value == doctest::Approx(g[T]).epsilon(1e-14));
        }
    }

    TEST_CASE("directional finite differences converge at second order")
    {
        Problem p(4);
        std::mt19937_64 rng(40);
        Eigen::VectorXd d = test::uniform_vector(rng, p.mesh.num_triangles(), -1.0, 1.0);
        d /= d.norm();
        const Misfit f(p.mesh, p.electrodes, p.patterns, p.data);
        const auto samples = directional_check(f, ConductivityField(p.sigma, 0.25), d, {0.2, 0.1, 0.05, 0.025, 0.0125});
        CHECK(loglog_slope(samples) == doctest::Approx(2.0).epsilon(0.1));
        CHECK_THROWS_AS(directional_check(f, ConductivityField(p.sigma, 0.25), d, {10.0}), InvalidArgument);
    }

    TEST_CASE("dense perturbation oracle for a constant conductivity")
    {
        const Mesh mesh = build_uniform_mesh(8);
        const ElectrodeModel el = ElectrodeModel::uniform(electrode_layout(mesh));
        const std::vector<CurrentPattern> pattern{synth_currents(16, 1)};
        const ConductivityField sigma = ConductivityField::constant(mesh, 1.0, 0.25);
        Eigen::MatrixXd data = Eigen::MatrixXd::Zero(1, 16);
        data(0, 3) = 0.2;
        data(0, 9) = -0.2;
        const Misfit f(mesh, el, pattern, data);
        const Eigen::VectorXd g = f.value_and_gradient(sigma).gradient;

        // df/dsigma_T = 2 r . B dc, with dx = -A^{-1} (dA/dsigma_T) x.
        const LinearSystem sys = assemble(mesh, el, sigma);
        const Eigen::MatrixXd A(sys.matrix());
        const Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
        const Eigen::VectorXd x = lu.solve(sys.rhs(pattern[0].I));
        const Eigen::VectorXd U = sys.voltage_basis() * x.tail(15);
        const Eigen::VectorXd r = U - data.row(0).transpose();
        for (int T : {0, 40, 90, 127}) {
            Eigen::VectorXd v = sigma.values;
            v[T] += 1.0;
            const Eigen::MatrixXd dA = Eigen::MatrixXd(assemble(mesh, el, ConductivityField(v, 0.25)).matrix()) - A;
            const Eigen::VectorXd dx = -lu.solve(dA * x);
            const double oracle = 2.0 * r.dot(sys.voltage_basis() * dx.tail(15));
            CHECK(g[T] == doctest::Approx(oracle).epsilon(1e-9));
        }
    }

    TEST_CASE("mismatched inputs are rejected")
    {
        Problem p(5);
        CHECK_THROWS_AS(Misfit(p.mesh, p.electrodes, p.patterns, Eigen::MatrixXd::Zero(2, 16)), InvalidArgument);
        CHECK_THROWS_AS(misfit_gradient(p.mesh, {}, {AdjointSolution{}}), InvalidArgument);
    }
}
