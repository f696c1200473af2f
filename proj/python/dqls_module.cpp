#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dqls/errors.hpp"
#include "dqls/experiment.hpp"
#include "dqls/filters.hpp"
#include "dqls/linear_solver.hpp"
#include "dqls/matrix_store.hpp"
#include "dqls/qsve.hpp"
#include "dqls/report_json.hpp"
#include "dqls/spectral_oracle.hpp"
#include "dqls/walk_operator.hpp"

namespace py = pybind11;
using namespace dqls;

namespace {

dqls::SolverConfig make_config(double kappa, double epsilon, int t_bits, const std::string &mode,
                               const std::string &filter, const std::string &backend, int repetitions,
                               std::uint64_t seed) {
    SolverConfig config;
    config.kappa = kappa;
    config.epsilon = epsilon;
    config.bits = t_bits;
    config.mode = parse_solver_mode(mode);
    config.filter = parse_filter_kind(filter);
    config.backend = parse_backend(backend);
    config.repetitions = repetitions;
    config.seed = seed;
    config.memory_guard = memory_guard_from_env();
    return config;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Frobenius-norm quantum linear systems simulator";

    auto base = py::register_exception<Error>(m, "Error");
    py::register_exception<ValidationError>(m, "ValidationError", base.ptr());
    py::register_exception<DegenerateError>(m, "DegenerateError", base.ptr());
    py::register_exception<ResourceError>(m, "ResourceError", base.ptr());

    py::class_<MatrixStore>(m, "MatrixStore")
        .def(py::init<std::size_t, std::size_t>(), py::arg("rows"), py::arg("cols"))
        .def_static("from_dense", &MatrixStore::from_dense)
        .def("store_entry", &MatrixStore::store_entry, py::arg("row"), py::arg("col"), py::arg("value"))
        .def("entry", &MatrixStore::entry)
        .def("to_dense", &MatrixStore::to_dense)
        .def("row_state", [](const MatrixStore &s, std::size_t row) { return s.row_state(row).amplitudes(); })
        .def("norm_vector_state", [](const MatrixStore &s) { return s.norm_vector_state().amplitudes(); })
        .def_property_readonly("rows", &MatrixStore::rows)
        .def_property_readonly("cols", &MatrixStore::cols)
        .def_property_readonly("frobenius_norm", &MatrixStore::frobenius_norm)
        .def_property_readonly("last_touched_nodes", &MatrixStore::last_touched_nodes)
        .def("consistent", &MatrixStore::consistent, py::arg("rel_tol") = 1e-12);

    m.def("condition_number", [](const Eigen::MatrixXd &a) { return decompose(a).kappa; });
    m.def("eigenvalues", [](const Eigen::MatrixXd &a) { return decompose(a).eigenvalues; });

    m.def("isometries", [](const MatrixStore &store) {
        const IsometryPair iso = build_isometries(store);
        return py::make_tuple(iso.row_isometry, iso.norm_isometry);
    });
    m.def("walk_matrix", [](const MatrixStore &store) { return build_walk(build_isometries(store)).matrix(); });

    m.def(
        "qsve",
        [](const MatrixStore &store, const Eigen::VectorXd &b, int t_bits, const std::string &backend,
           std::size_t shots, int repetitions, std::uint64_t seed) {
            QsveOptions opts;
            opts.bits = t_bits;
            opts.backend = parse_backend(backend);
            opts.mode = shots > 0 ? QsveMode::sampled : QsveMode::coherent;
            opts.shots = shots;
            opts.repetitions = repetitions;
            opts.seed = seed;
            return to_json(qsve_run(store, b.cast<Complex>(), opts)).dump();
        },
        py::arg("store"), py::arg("b"), py::arg("t_bits") = 8, py::arg("backend") = "exact-spectral",
        py::arg("shots") = 0, py::arg("repetitions") = 15, py::arg("seed") = 0);

    m.def(
        "solve",
        [](const MatrixStore &store, const Eigen::VectorXd &b, double kappa, double epsilon, int t_bits,
           const std::string &mode, const std::string &filter, const std::string &backend, int repetitions,
           std::uint64_t seed) {
            const SolverConfig config = make_config(kappa, epsilon, t_bits, mode, filter, backend, repetitions, seed);
            return to_json(dqls::solve(store, b, config)).dump();
        },
        py::arg("store"), py::arg("b"), py::arg("kappa") = 0.0, py::arg("epsilon") = 0.05, py::arg("t_bits") = 0,
        py::arg("mode") = "corrected", py::arg("filter") = "invert-only", py::arg("backend") = "exact-spectral",
        py::arg("repetitions") = 15, py::arg("seed") = 0);

    m.def("filter_h",
          [](double lambda, double kappa, double gamma, const std::string &kind) {
              return FilterFunctions(kappa, gamma, parse_filter_kind(kind)).h(lambda).as_vector();
          },
          py::arg("lam"), py::arg("kappa"), py::arg("gamma"), py::arg("kind") = "full-fgh");

    m.def("generate_matrix",
          [](const std::string &family, std::size_t n, double kappa, std::uint64_t seed) {
              return generate_matrix(parse_family(family), n, kappa, seed);
          },
          py::arg("family"), py::arg("n"), py::arg("kappa"), py::arg("seed") = 0);
}
