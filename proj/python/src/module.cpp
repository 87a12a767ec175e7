// Python bindings: meshes, discretizations, the nonlinear solver and the studies.
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "polyhho/bench.hpp"

namespace py = pybind11;
using namespace polyhho;

namespace {

/// Python callable (x, y) -> (a, b) as a vector field.
VectorField vector_field(const py::object& fn) {
    if (fn.is_none()) return [](const Point&) { return Point(Point::Zero()); };
    return [fn](const Point& x) {
        const auto v = fn(x.x(), x.y()).cast<std::vector<double>>();
        if (v.size() != 2) throw std::invalid_argument("vector field must return two values");
        return Point(v[0], v[1]);
    };
}

py::dict state_dict(const NewtonPTCState& st) {
    py::dict d;
    d["u"] = st.u;
    d["p"] = st.p;
    d["iterations"] = st.iterations;
    d["converged"] = st.converged;
    d["status"] = st.status;
    d["residuals"] = st.residuals;
    d["tolerance"] = st.tolerance;
    return d;
}

py::list report_rows(const ExperimentReport& r) {
    py::list rows;
    for (const LevelRow& row : r.rows) {
        py::dict d;
        d["level"] = row.level;
        d["N_dof"] = row.n_dof;
        d["h"] = row.h;
        d["err_energy"] = row.err_energy;
        d["eoc_energy"] = row.eoc_energy;
        d["err_u_l2"] = row.err_u_l2;
        d["eoc_u"] = row.eoc_u;
        d["err_p_l2"] = row.err_p_l2;
        d["eoc_p"] = row.eoc_p;
        d["iters"] = row.iters;
        d["seconds"] = row.seconds;
        d["converged"] = row.converged;
        rows.append(d);
    }
    return rows;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Pressure-robust HHO Navier-Stokes solver on polygonal meshes";
    m.attr("__version__") = kVersion;

    py::register_exception<MeshError>(m, "MeshError", PyExc_ValueError);
    py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

    py::enum_<MeshFamily>(m, "MeshFamily")
        .value("cartesian", MeshFamily::cartesian)
        .value("hexagonal", MeshFamily::hexagonal)
        .value("kershaw", MeshFamily::kershaw);
    py::enum_<Mode>(m, "Mode").value("robust", Mode::robust).value("classic", Mode::classic);

    py::class_<RegularityReport>(m, "RegularityReport")
        .def_readonly("max_submesh_cells", &RegularityReport::max_submesh_cells)
        .def_readonly("max_cell_faces", &RegularityReport::max_cell_faces)
        .def_readonly("min_shape_ratio", &RegularityReport::min_shape_ratio);

    py::class_<PolyMesh>(m, "PolyMesh")
        .def(py::init([](std::vector<Point> vertices, std::vector<std::vector<std::size_t>> loops) {
                 return build_mesh(std::move(vertices), std::move(loops));
             }),
             py::arg("vertices"), py::arg("cells"))
        .def_property_readonly("num_vertices", &PolyMesh::num_vertices)
        .def_property_readonly("num_cells", &PolyMesh::num_cells)
        .def_property_readonly("num_faces", &PolyMesh::num_faces)
        .def_property_readonly("num_boundary_faces", &PolyMesh::num_boundary_faces)
        .def_property_readonly("meshsize", &PolyMesh::meshsize)
        .def_property_readonly("total_area", &PolyMesh::total_area)
        .def_property_readonly("vertices", [](const PolyMesh& mesh) {
            Eigen::MatrixX2d v(static_cast<Eigen::Index>(mesh.num_vertices()), 2);
            for (std::size_t i = 0; i < mesh.num_vertices(); ++i) v.row(static_cast<Eigen::Index>(i)) = mesh.vertex(i).transpose();
            return v;
        })
        .def_property_readonly("cells", [](const PolyMesh& mesh) {
            std::vector<std::vector<std::size_t>> out;
            for (const Cell& c : mesh.cells()) out.push_back(c.vertices);
            return out;
        })
        .def("regularity", &regularity_report)
        .def("to_string", &write_mesh_string)
        .def("save", [](const PolyMesh& mesh, const std::string& path) { save_mesh(mesh, path); });

    m.def("generate", [](const std::string& family, std::size_t n) { return generate(parse_family(family), n); },
          py::arg("family"), py::arg("n"));
    m.def("load_mesh", &load_mesh, py::arg("path"));
    m.def("read_mesh_string", &read_mesh_string, py::arg("text"));

    py::class_<SolverConfig>(m, "SolverConfig")
        .def(py::init<>())
        .def_readwrite("dt0", &SolverConfig::dt0)
        .def_readwrite("dt_max", &SolverConfig::dt_max)
        .def_readwrite("stop_tol", &SolverConfig::stop_tol)
        .def_readwrite("max_iter", &SolverConfig::max_iter)
        .def_readwrite("mode", &SolverConfig::mode)
        .def_readwrite("verbose", &SolverConfig::verbose);

    py::class_<Discretization, std::shared_ptr<Discretization>>(m, "Discretization")
        .def(py::init<PolyMesh, int>(), py::arg("mesh"), py::arg("k"))
        .def_property_readonly("k", &Discretization::k)
        .def_property_readonly("mesh", &Discretization::mesh, py::return_value_policy::reference_internal)
        .def_property_readonly("num_velocity_dofs", &Discretization::num_velocity_dofs)
        .def_property_readonly("num_pressure_dofs", &Discretization::num_pressure_dofs)
        .def_property_readonly("num_condensed_unknowns", [](const Discretization& d) { return condensed_size(d); })
        .def("interpolate", [](const Discretization& d, const py::object& fn) { return interpolate(d.mesh(), d.k(), vector_field(fn)); })
        .def("divergence", [](const Discretization& d, const Eigen::VectorXd& u) { return Eigen::VectorXd(assemble_coupling(d) * u); },
             "Coupling matrix applied to velocity dofs, -(D u, q) per pressure dof.");

    m.def(
        "solve",
        [](const Discretization& disc, const py::object& f, const py::object& g, double nu, bool convection,
           const SolverConfig& cfg) {
            Problem pr;
            pr.f = vector_field(f);
            pr.g = vector_field(g);
            pr.nu = nu;
            pr.convection = convection;
            return state_dict(ptc_newton_solve(disc, pr, cfg));
        },
        py::arg("disc"), py::arg("f") = py::none(), py::arg("g") = py::none(), py::arg("nu") = 1., py::arg("convection") = true,
        py::arg("config") = SolverConfig{});

    m.def(
        "kovasznay",
        [](int k, int levels, std::size_t base_n, const std::string& family, double nu, const SolverConfig& cfg) {
            StudyOptions o;
            o.k = k;
            o.levels = levels;
            o.base_n = base_n;
            o.family = parse_family(family);
            o.nu = nu;
            o.solver = cfg;
            const ExperimentReport r = run_kovasznay(o);
            return py::make_tuple(report_rows(r), r.csv());
        },
        py::arg("k") = 1, py::arg("levels") = 4, py::arg("base_n") = 10, py::arg("family") = "cartesian", py::arg("nu") = 0.025,
        py::arg("config") = SolverConfig{}, "Convergence study; returns (rows, csv).");

    m.def(
        "robustness",
        [](int k, int levels, std::size_t base_n, const std::string& family, double lambda, const SolverConfig& cfg) {
            StudyOptions o;
            o.k = k;
            o.levels = levels;
            o.base_n = base_n;
            o.family = parse_family(family);
            o.lambda = lambda;
            o.solver = cfg;
            const ExperimentReport r = run_robustness(o);
            return py::make_tuple(report_rows(r), r.csv());
        },
        py::arg("k") = 1, py::arg("levels") = 1, py::arg("base_n") = 10, py::arg("family") = "cartesian", py::arg("lambda_") = 1e6,
        py::arg("config") = SolverConfig{}, "Irrotational forcing study; returns (rows, csv).");

    m.def(
        "cavity",
        [](double re, int k, std::size_t n, const std::string& family, double lambda, const std::string& psi, std::size_t samples,
           const SolverConfig& cfg) {
            CavityOptions o;
            o.re = re;
            o.k = k;
            o.n = n;
            o.family = parse_family(family);
            o.lambda = lambda;
            o.psi = psi;
            o.samples = samples;
            o.solver = cfg;
            const CavityResult r = run_cavity(o);
            py::dict d = state_dict(r.state);
            d["N_dof"] = r.n_dof;
            d["s"] = r.s;
            d["u1"] = r.u1;
            d["u2"] = r.u2;
            return d;
        },
        py::arg("re") = 100., py::arg("k") = 1, py::arg("n") = 16, py::arg("family") = "cartesian", py::arg("lambda_") = 0.,
        py::arg("psi") = "poly:cubic", py::arg("samples") = 101, py::arg("config") = SolverConfig{},
        "Lid-driven cavity; centerline profiles u1(1/2, s) and u2(s, 1/2).");

    m.def(
        "proptest",
        [](std::size_t n, int samples) {
            PropertyOptions o;
            o.n = n;
            o.samples = samples;
            std::vector<py::tuple> out;
            for (const PropertyCheck& c : run_property_suite(o)) out.push_back(py::make_tuple(c.name, c.value, c.tol, c.pass()));
            return out;
        },
        py::arg("n") = 4, py::arg("samples") = 50, "Operator invariants as (name, value, tol, passed) tuples.");
}
