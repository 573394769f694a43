#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "wgeit/cem_forward.hpp"
#include "wgeit/error.hpp"
#include "wgeit/manufactured.hpp"
#include "wgeit/mesh.hpp"
#include "wgeit/recon.hpp"
#include "wgeit/tv_prox.hpp"
#include "wgeit/version.hpp"

namespace py = pybind11;
using namespace wgeit;

namespace {

std::vector<CurrentPattern> patterns_from(const Eigen::MatrixXd& currents)
{
    std::vector<CurrentPattern> out;
    for (Eigen::Index k = 0; k < currents.rows(); ++k)
        out.emplace_back(currents.row(k).transpose());
    return out;
}

Eigen::MatrixXd patterns_to_matrix(const std::vector<CurrentPattern>& patterns)
{
    Eigen::MatrixXd m(patterns.size(), patterns.empty() ? 0 : patterns[0].I.size());
    for (std::size_t k = 0; k < patterns.size(); ++k)
        m.row(static_cast<Eigen::Index>(k)) = patterns[k].I.transpose();
    return m;
}

Eigen::MatrixXd triangle_array(const std::vector<std::array<int, 3>>& tris)
{
    Eigen::MatrixXd m(tris.size(), 3);
    for (std::size_t t = 0; t < tris.size(); ++t)
        for (int j = 0; j < 3; ++j)
            m(static_cast<Eigen::Index>(t), j) = tris[t][j];
    return m;
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Weak Galerkin EIT core";
    m.attr("__version__") = wgeit::version;

    py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_RuntimeError);

    py::class_<Mesh>(m, "Mesh")
        .def_readonly("n_subdiv", &Mesh::n_subdiv)
        .def_readonly("h", &Mesh::h)
        .def_property_readonly("num_triangles", &Mesh::num_triangles)
        .def_property_readonly("num_edges", &Mesh::num_edges)
        .def_property_readonly("num_vertices", &Mesh::num_vertices)
        .def_property_readonly("areas", [](const Mesh& mesh) { return mesh.areas; })
        .def_property_readonly("vertices",
                               [](const Mesh& mesh) {
                                   Eigen::MatrixXd v(mesh.num_vertices(), 2);
                                   for (int i = 0; i < mesh.num_vertices(); ++i)
                                       v.row(i) = mesh.vertices[i].transpose();
                                   return v;
                               })
        .def_property_readonly("triangles", [](const Mesh& mesh) { return triangle_array(mesh.triangles); });

    m.def("uniform_mesh", &build_uniform_mesh, py::arg("n_subdiv"));

    m.def(
        "synth_currents", [](int L, int K) { return patterns_to_matrix(synth_currents(L, K)); },
        py::arg("num_electrodes") = 16, py::arg("K") = 10, "K x L zero-sum unit-norm sinusoidal patterns.");

    m.def(
        "forward_map",
        [](const Mesh& mesh, const Eigen::VectorXd& sigma, const Eigen::MatrixXd& currents, int num_electrodes,
           double electrode_length, double impedance, double lambda) {
            const ElectrodeSetup setup{num_electrodes, electrode_length, impedance};
            const ElectrodeModel electrodes = setup.build(mesh);
            return forward_map(mesh, electrodes, ConductivityField(sigma, lambda), patterns_from(currents));
        },
        py::arg("mesh"), py::arg("sigma"), py::arg("currents"), py::arg("num_electrodes") = 16,
        py::arg("electrode_length") = 0.125, py::arg("impedance") = 1.0, py::arg("lambda_") = 0.25,
        "Electrode voltages (K x L) for a per-triangle conductivity.");

    m.def(
        "convergence_study",
        [](const std::vector<int>& n_subdivs) {
            py::list rows;
            for (const auto& r : convergence_study(bump_solution(), n_subdivs)) {
                py::dict d;
                d["n_subdiv"] = r.n_subdiv;
                d["h"] = r.h;
                d["err_u"] = r.err_u;
                d["order_u"] = r.order_u;
                d["err_U"] = r.err_U;
                d["order_U"] = r.order_U;
                rows.append(d);
            }
            return rows;
        },
        py::arg("n_subdivs"), "Errors and observed orders for the bump solution.");

    m.def(
        "fgp_denoise",
        [](const Eigen::MatrixXd& d, double beta, double lambda, int max_iter, double tol) {
            return fgp_denoise(d, beta, lambda, FgpOptions{max_iter, tol}).x;
        },
        py::arg("d"), py::arg("beta"), py::arg("lambda_") = 0.25, py::arg("max_iter") = 50, py::arg("tol") = 1e-5,
        "Box-constrained TV denoising of a cell grid.");

    m.def("tv_grid", &tv_grid, py::arg("x"));

    m.def("count_components", &count_components, py::arg("mesh"), py::arg("values"), py::arg("threshold"));

    m.def(
        "reconstruct",
        [](const std::string& example, double alpha, const std::vector<int>& schedule, const std::vector<int>& iters,
           int n_data, double epsilon, std::uint64_t seed, double L0, bool warm_start) {
            Experiment e = catalog_experiment(example);
            e.alpha = alpha;
            e.n_data = n_data;
            e.epsilon = epsilon;
            e.seed = seed;
            e.fista.L0 = L0;
            e.warm_start = warm_start;
            if (iters.size() != schedule.size() && iters.size() != 1)
                throw InvalidArgument("iters must have one entry or one per level");
            e.schedule.clear();
            for (std::size_t l = 0; l < schedule.size(); ++l)
                e.schedule.push_back({schedule[l], iters.size() == 1 ? iters[0] : iters[l]});
            ReconstructionResult r;
            {
                py::gil_scoped_release release;
                r = reconstruct(e);
            }
            py::list levels;
            for (const auto& lv : r.levels) {
                py::dict d;
                d["n_subdiv"] = lv.n_subdiv;
                d["h"] = lv.h;
                d["sigma"] = lv.sigma;
                d["rel_l2_error"] = lv.rel_l2_error;
                d["F"] = lv.fista.F;
                d["error_history"] = lv.error_history;
                std::vector<double> F;
                for (const auto& it : lv.fista.history)
                    F.push_back(it.F);
                d["F_history"] = F;
                levels.append(d);
            }
            py::dict out;
            out["clean_data"] = r.clean_data;
            out["data"] = r.data.voltages;
            out["levels"] = levels;
            return out;
        },
        py::arg("example"), py::arg("alpha"), py::arg("schedule"), py::arg("iters"), py::arg("n_data") = 128,
        py::arg("epsilon") = 0.0, py::arg("seed") = 0, py::arg("L0") = 1.0, py::arg("warm_start") = false,
        "TV-regularized FISTA reconstruction of a catalog example.");
}
