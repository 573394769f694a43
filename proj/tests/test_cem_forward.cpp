#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/Dense>

#include "helpers.hpp"
#include "wgeit/cem_forward.hpp"
#include "wgeit/error.hpp"
#include "wgeit/manufactured.hpp"
#include "wgeit/recon.hpp"

using namespace wgeit;

namespace {

struct Setup {
    Mesh mesh;
    ElectrodeModel electrodes;

    explicit Setup(int n) : mesh(build_uniform_mesh(n)), electrodes(ElectrodeModel::uniform(electrode_layout(mesh))) {}
};

Eigen::VectorXd random_pattern(std::mt19937_64& rng, int L)
{
    Eigen::VectorXd I = test::uniform_vector(rng, L, -1.0, 1.0);
    I.array() -= I.mean();
    return I;
}

} // namespace

TEST_SUITE("cem_forward")
{
    TEST_CASE("input validation")
    {
        const Mesh m = build_uniform_mesh(8);
        CHECK_THROWS_AS(ElectrodeModel::uniform(electrode_layout(m), 0.0), InvalidArgument);
        CHECK_THROWS_AS(ElectrodeModel(electrode_layout(m), Eigen::VectorXd::Ones(3)), InvalidArgument);
        CHECK_THROWS_AS(CurrentPattern(Eigen::VectorXd::Ones(16)), InvalidArgument);
        CHECK_THROWS_AS(ConductivityField::constant(m, 5.0, 0.25), InvalidArgument);
        CHECK_THROWS_AS(ConductivityField::constant(m, 1.0, 1.5), InvalidArgument);
        CHECK_NOTHROW(ConductivityField::constant(m, 4.0, 0.25));
    }

    TEST_CASE("widened fields contain their values exactly")
    {
        for (double top : {3.0, 7.0, 10.0, 1.0 / 0.3}) {
            Eigen::VectorXd v(3);
            v << 0.01, 1.0, top;
            const ConductivityField f = ConductivityField::widened(v, 0.25);
            CHECK(f.lambda <= 0.01);
            CHECK(1.0 / f.lambda >= top);
        }
        CHECK_THROWS_AS(ConductivityField::widened(Eigen::VectorXd::Zero(2), 0.25), InvalidArgument);
    }

    TEST_CASE("zero-sum basis is orthonormal and orthogonal to constants")
    {
        for (int L : {2, 5, 16}) {
            const Eigen::MatrixXd B = zero_sum_basis(L);
            CHECK(B.rows() == L);
            CHECK(B.cols() == L - 1);
            CHECK((B.transpose() * B - Eigen::MatrixXd::Identity(L - 1, L - 1)).norm() < 1e-14);
            CHECK(B.colwise().sum().norm() < 1e-14);
        }
    }

    TEST_CASE("system size, symmetry and positive definiteness (dense oracle)")
    {
        const Setup s(8);
        const LinearSystem sys = assemble(s.mesh, s.electrodes, ConductivityField::constant(s.mesh, 1.0, 0.25));
        CHECK(sys.size() == 3 * s.mesh.num_triangles() + s.mesh.num_edges() + 15);
        const Eigen::MatrixXd A(sys.matrix());
        CHECK((A - A.transpose()).cwiseAbs().maxCoeff() < 1e-13);
        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(A);
        CHECK(eig.eigenvalues().minCoeff() > 0.0);
        CHECK(sys.min_pivot() > 0.0);
    }

    TEST_CASE("the matrix is affine in sigma and sigma only enters the gradient block")
    {
        std::mt19937_64 rng(3);
        const Setup s(8);
        const Eigen::VectorXd v = test::uniform_vector(rng, s.mesh.num_triangles(), 0.5, 1.0);
        const Eigen::MatrixXd A1(assemble(s.mesh, s.electrodes, ConductivityField(v, 0.25)).matrix());
        const Eigen::MatrixXd A2(assemble(s.mesh, s.electrodes, ConductivityField(2.0 * v, 0.25)).matrix());
        const Eigen::MatrixXd A3(assemble(s.mesh, s.electrodes, ConductivityField(3.0 * v, 0.25)).matrix());
        CHECK(((A3 - A2) - (A2 - A1)).cwiseAbs().maxCoeff() < 1e-10);
        const int nv = 15;
        CHECK((A2.bottomRows(nv) - A1.bottomRows(nv)).cwiseAbs().maxCoeff() == 0.0);
        // Interior unknowns only see the stabilizer, which carries no sigma.
        const int off = 3 * s.mesh.num_triangles();
        const Eigen::MatrixXd D = A2 - A1;
        CHECK(D.topLeftCorner(off, off).cwiseAbs().maxCoeff() < 1e-12);
    }

    TEST_CASE("zero current gives the zero solution")
    {
        const Setup s(16);
        const LinearSystem sys = assemble(s.mesh, s.electrodes, ConductivityField::constant(s.mesh, 1.0, 0.25));
        const ForwardSolution sol = solve_forward(sys, CurrentPattern(Eigen::VectorXd::Zero(16)));
        CHECK(sol.U.cwiseAbs().maxCoeff() == 0.0);
        CHECK(sol.u.interior.cwiseAbs().maxCoeff() == 0.0);
        CHECK(sol.u.traces.cwiseAbs().maxCoeff() == 0.0);
    }

    TEST_CASE("voltages are zero-sum, reciprocal and linear in the current")
    {
        std::mt19937_64 rng(21);
        const Setup s(16);
        const Eigen::VectorXd v = test::uniform_vector(rng, s.mesh.num_triangles(), 0.5, 2.0);
        const LinearSystem sys = assemble(s.mesh, s.electrodes, ConductivityField(v, 0.25));
        const Eigen::VectorXd Ia = random_pattern(rng, 16), Ib = random_pattern(rng, 16);
        const ForwardSolution a = solve_forward(sys, CurrentPattern(Ia));
        const ForwardSolution b = solve_forward(sys, CurrentPattern(Ib));
        CHECK(std::abs(a.U.sum()) < 1e-12);
        CHECK(std::abs(a.U.dot(Ib) - b.U.dot(Ia)) < 1e-10 * a.U.norm() * Ib.norm());
        const Eigen::MatrixXd M = forward_map(sys, {CurrentPattern(Ia), CurrentPattern(Ib), CurrentPattern(Ia + Ib)});
        CHECK((M.row(2) - M.row(0) - M.row(1)).norm() < 1e-10 * M.row(2).norm());
        CHECK((M.row(0).transpose() - a.U).norm() < 1e-12);
        // a_s(u_a, u_b) = <U_a, I_b>
        CHECK(energy_pairing(sys, a, b) == doctest::Approx(a.U.dot(Ib)).epsilon(1e-9));
    }

    TEST_CASE("pack and unpack are inverse on zero-sum voltages")
    {
        std::mt19937_64 rng(8);
        const Setup s(8);
        const LinearSystem sys = assemble(s.mesh, s.electrodes, ConductivityField::constant(s.mesh, 1.0, 0.25));
        const Eigen::VectorXd x = test::uniform_vector(rng, sys.size(), -1.0, 1.0);
        const ForwardSolution f = sys.unpack(x);
        CHECK(std::abs(f.U.sum()) < 1e-13);
        CHECK((pack(sys, f.u, f.U) - x).norm() < 1e-13);
    }

    TEST_CASE("the residual check accepts direct solves")
    {
        const Setup s(16);
        const LinearSystem sys = assemble(s.mesh, s.electrodes, ConductivityField::constant(s.mesh, 1.3, 0.25));
        const auto patterns = synth_currents(16, 3);
        const Eigen::VectorXd b = sys.rhs(patterns[1].I);
        CHECK(sys.relative_residual(sys.solve(b), b) < 1e-10);
    }

    TEST_CASE("iterative fallback agrees with the direct solve")
    {
        const Setup s(16);
        const ConductivityField sigma = ConductivityField::constant(s.mesh, 0.7, 0.25);
        SolverOptions cg;
        cg.direct_max_unknowns = 0;
        const LinearSystem direct = assemble(s.mesh, s.electrodes, sigma);
        const LinearSystem iterative = assemble(s.mesh, s.electrodes, sigma, cg);
        const auto patterns = synth_currents(16, 4);
        const Eigen::MatrixXd a = forward_map(direct, patterns), b = forward_map(iterative, patterns);
        CHECK((a - b).norm() < 1e-8 * a.norm());
    }

    TEST_CASE("linear manufactured solution is reproduced to round-off")
    {
        const auto rows = convergence_study(linear_solution(0.4, 1.0, -0.5), {8, 16});
        for (const auto& r : rows) {
            CHECK(r.err_u < 1e-12);
            CHECK(r.err_U < 1e-12);
        }
    }

    TEST_CASE("bump convergence is second order")
    {
        const auto rows = convergence_study(bump_solution(), {8, 16, 32});
        REQUIRE(rows.size() == 3);
        CHECK(std::isnan(rows[0].order_u));
        CHECK(rows[2].order_u == doctest::Approx(2.0).epsilon(0.1));
        CHECK(rows[2].order_U == doctest::Approx(2.0).epsilon(0.1));
    }

    TEST_CASE("single-mesh convergence CSV leaves orders empty")
    {
        std::ostringstream os;
        write_convergence_csv(os, convergence_study(bump_solution(), {8}));
        const std::string s = os.str();
        CHECK(s.rfind("h,err_u,order_u,err_U,order_U\n", 0) == 0);
        CHECK(s.find(",,") != std::string::npos);
    }
}
