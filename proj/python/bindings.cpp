#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "qimf/cli.hpp"
#include "qimf/problems.hpp"
#include "qimf/solver.hpp"

namespace py = pybind11;
using namespace qimf;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Mean-field QUBO solver core";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_RuntimeError);

  py::class_<QuboInstance>(m, "QuboInstance")
      .def(py::init<>())
      .def_readwrite("num_vars", &QuboInstance::num_vars)
      .def_readwrite("entries", &QuboInstance::entries)
      .def_readwrite("linear", &QuboInstance::linear)
      .def_readwrite("block_labels", &QuboInstance::block_labels)
      .def_readwrite("metadata", &QuboInstance::metadata)
      .def("at", &QuboInstance::at)
      .def("set", &QuboInstance::set)
      .def("num_blocks", &QuboInstance::num_blocks)
      .def("to_json", [](const QuboInstance& q) { return to_json(q); })
      .def_static("from_json", &from_json)
      .def("__eq__", [](const QuboInstance& a, const QuboInstance& b) { return a == b; });

  m.def("load", &load);
  m.def("save", &save);
  m.def("validate", py::overload_cast<const QuboInstance&>(&validate));
  m.def("quadratic_form", &quadratic_form);
  m.def(
      "generate_wsbm",
      [](std::vector<std::size_t> sizes, double p_diag, double p_off, const std::string& w_diag,
         const std::string& w_off, std::uint64_t seed) {
        return generate_wsbm(WsbmSpec::two_level(std::move(sizes), p_diag, p_off,
                                                 parse_distribution(w_diag),
                                                 parse_distribution(w_off)),
                             seed);
      },
      py::arg("block_sizes"), py::arg("p_diag"), py::arg("p_off"), py::arg("w_diag"),
      py::arg("w_off"), py::arg("seed") = 0);

  py::class_<IsingHamiltonian>(m, "IsingHamiltonian")
      .def_readonly("num_qubits", &IsingHamiltonian::num_qubits)
      .def_readonly("offset", &IsingHamiltonian::offset)
      .def("num_terms", &IsingHamiltonian::num_terms)
      .def("terms", [](const IsingHamiltonian& h) {
        std::vector<std::pair<std::vector<Index>, double>> out;
        for (const auto& t : h.terms) out.emplace_back(t.support, t.coefficient);
        return out;
      });

  m.def("instance_hamiltonian", &instance_hamiltonian);
  m.def("ising_to_qubo", &ising_to_qubo);
  m.def("evaluate_full", &evaluate_full);
  m.def("brute_force", &brute_force);
  m.def("preprocess", [](const IsingHamiltonian& h) {
    auto r = preprocess_dominant(h);
    return py::make_tuple(r.fixed, r.reduced, r.kept);
  });

  m.def(
      "shot_count_block",
      [](std::size_t n_w, std::size_t blocks, double p, double q) {
        auto sc = shot_count_block(n_w, blocks, p, q);
        return py::make_tuple(sc.n_s, sc.warning);
      },
      py::arg("n_w"), py::arg("num_blocks"), py::arg("p"), py::arg("q"));
  m.def("shot_count_simple", &shot_count_simple, py::arg("n_w"), py::arg("num_blocks"));

  m.def(
      "cost_s",
      [](const IsingHamiltonian& h, const Assignment& x, std::size_t n_s, const std::string& mode,
         std::uint64_t seed) {
        Rng rng(seed);
        return cost_s(ShotAllocator(h), x, n_s, parse_estimator_mode(mode), rng);
      },
      py::arg("h"), py::arg("x"), py::arg("n_s"), py::arg("mode") = "paper", py::arg("seed") = 0);

  py::class_<RunTrace>(m, "RunTrace")
      .def_property_readonly("algorithm", [](const RunTrace& t) { return to_string(t.algorithm); })
      .def_readonly("seed", &RunTrace::seed)
      .def_readonly("n_w", &RunTrace::n_w)
      .def_readonly("n_s", &RunTrace::n_s)
      .def_readonly("n_b", &RunTrace::n_b)
      .def_readonly("final_assignment", &RunTrace::final_assignment)
      .def_readonly("final_cost", &RunTrace::final_cost)
      .def_readonly("fixed", &RunTrace::fixed)
      .def_property_readonly("queries", [](const RunTrace& t) { return t.ledger.total; })
      .def_property_readonly("best_cost", &RunTrace::best_cost)
      .def_property_readonly("mean_costs",
                             [](const RunTrace& t) {
                               std::vector<double> out;
                               for (const auto& r : t.records) out.push_back(r.mean_cost);
                               return out;
                             })
      .def("trace_csv", [](const RunTrace& t) { return cli::trace_csv(t); });

  m.def(
      "solve",
      [](const IsingHamiltonian& h, const std::string& algo, std::size_t n_b, std::size_t n_s,
         std::size_t n_e, const std::string& estimator, std::uint64_t seed, bool preprocess) {
        SolverConfig cfg;
        cfg.algorithm = parse_algorithm(algo);
        cfg.n_b = n_b;
        cfg.n_s = n_s;
        cfg.n_e = n_e;
        cfg.estimator_mode = parse_estimator_mode(estimator);
        cfg.seed = seed;
        cfg.preprocess = preprocess;
        py::gil_scoped_release release;
        return solve(h, cfg);
      },
      py::arg("h"), py::arg("algo") = "qimf", py::arg("n_b") = 40, py::arg("n_s") = 1,
      py::arg("n_e") = 1000, py::arg("estimator") = "paper", py::arg("seed") = 0,
      py::arg("preprocess") = false);

  m.def("build_portfolio",
        py::overload_cast<const Matrix&, const std::vector<double>&, double>(&build_portfolio));
  m.def("build_maxcut", [](std::size_t n, const std::vector<std::tuple<Index, Index, double>>& edges) {
    Graph g;
    g.num_nodes = n;
    for (const auto& [u, v, w] : edges) g.edges.push_back({u, v, w});
    return build_maxcut(g);
  });
  m.def("build_ising", &build_ising);

  m.def("run_cli", [](const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return py::make_tuple(code, out.str(), err.str());
  });
}
