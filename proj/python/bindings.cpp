// Python module _dogs: models, influence bounds, Dobrushin variation, scan
// optimization, Gibbs estimation, exact oracles and the experiment drivers.

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dogs/error.hpp"
#include "dogs/exact.hpp"
#include "dogs/experiments.hpp"
#include "dogs/gibbs.hpp"
#include "dogs/influence.hpp"
#include "dogs/io.hpp"
#include "dogs/model.hpp"
#include "dogs/optimizer.hpp"
#include "dogs/scan.hpp"
#include "dogs/variation.hpp"

namespace py = pybind11;
using namespace dogs;

namespace {

py::object to_python(const json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

json from_python(const py::object& o) {
  return json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

std::vector<std::vector<double>> dense(const InfluenceMatrix& c) {
  std::vector<std::vector<double>> out(c.size(), std::vector<double>(c.size(), 0.0));
  for (const auto& e : c.entries()) out[e.row][e.col] = e.value;
  return out;
}

WeightVector weights(const py::object& d, std::size_t p) {
  if (d.is_none()) return WeightVector::ones(p);
  if (py::isinstance<py::str>(d)) return parse_weights(d.cast<std::string>(), p);
  return WeightVector(d.cast<std::vector<double>>());
}

OptimizerConfig optimizer_config(std::optional<double> epsilon, const std::string& tie_break) {
  OptimizerConfig c;
  c.epsilon = epsilon;
  c.tie_break = parse_tie_break(tie_break);
  return c;
}

py::dict optimized_dict(const OptimizedScan& r, const OptimizerConfig& c) {
  py::dict out = to_python(optimizer_report(r, c)).cast<py::dict>();
  out["scan"] = r.scan;
  return out;
}

}  // namespace

PYBIND11_MODULE(_dogs, m) {
  m.doc() = "Dobrushin-optimized Gibbs sampling";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<SizeGuardError>(m, "SizeGuardError", PyExc_MemoryError);
  py::register_exception<ConsistencyError>(m, "ConsistencyError", PyExc_RuntimeError);

  py::class_<BinaryPairwiseMrf>(m, "IsingModel")
      .def(py::init([](const std::vector<std::tuple<std::size_t, std::size_t, double>>& pairs,
                       std::vector<double> unary) {
             std::vector<Coupling> c;
             for (const auto& [i, j, t] : pairs) c.push_back({i, j, t});
             return BinaryPairwiseMrf::build(c, std::move(unary));
           }),
           py::arg("couplings"), py::arg("unary"))
      .def_static(
          "lattice",
          [](std::size_t rows, std::size_t cols, std::optional<double> coupling, bool toroidal,
             std::uint64_t seed) {
            const LatticeSpec spec = coupling ? LatticeSpec::constant(rows, cols, *coupling, toroidal)
                                              : LatticeSpec::random_field(rows, cols);
            return lattice_ising(spec, seed);
          },
          py::arg("rows"), py::arg("cols"), py::arg("coupling") = py::none(),
          py::arg("toroidal") = false, py::arg("seed") = 1,
          "Grid model; random-field weights unless a constant coupling is given.")
      .def_property_readonly("size", &BinaryPairwiseMrf::size)
      .def_property_readonly("couplings",
                             [](const BinaryPairwiseMrf& x) {
                               std::vector<std::tuple<std::size_t, std::size_t, double>> out;
                               for (const auto& c : x.couplings()) out.emplace_back(c.i, c.j, c.theta);
                               return out;
                             })
      .def_property_readonly("unary",
                             [](const BinaryPairwiseMrf& x) {
                               return std::vector<double>(x.unary().begin(), x.unary().end());
                             })
      .def("blanket", [](const BinaryPairwiseMrf& x, std::size_t i) { return markov_blanket(x, i); })
      .def("to_json", [](const BinaryPairwiseMrf& x) { return to_python(model_to_json(AnyModel{x})); });

  m.def("model_from_json", [](const py::object& o) {
    const AnyModel model = model_from_json(from_python(o));
    if (const auto* b = std::get_if<BinaryPairwiseMrf>(&model)) return *b;
    throw ConfigError("only binary pairwise models are exposed to Python");
  });

  py::class_<InfluenceMatrix>(m, "InfluenceMatrix")
      .def_property_readonly("size", &InfluenceMatrix::size)
      .def_property_readonly("provenance", &InfluenceMatrix::provenance)
      .def("at", &InfluenceMatrix::at)
      .def("dense", &dense)
      .def("max_row_sum", &InfluenceMatrix::max_row_sum)
      .def("to_json", [](const InfluenceMatrix& c) { return to_python(influence_to_json(c)); });

  m.def("influence_bound", py::overload_cast<const BinaryPairwiseMrf&>(&influence_bound));
  m.def("exact_influence", py::overload_cast<const BinaryPairwiseMrf&>(&exact_influence));
  m.def("scale_bound", &scale_bound, py::arg("bound"), py::arg("factor"));
  m.def("total_influence_norm",
        [](const InfluenceMatrix& c) { return total_influence_norm(c); });

  py::class_<Scan>(m, "Scan")
      .def_static("systematic", &Scan::systematic, py::arg("p"), py::arg("length"))
      .def_static("uniform", &Scan::uniform, py::arg("p"), py::arg("length"))
      .def_static("deterministic", &Scan::deterministic, py::arg("p"), py::arg("indices"))
      .def_static("explicit", &Scan::explicit_vectors, py::arg("p"), py::arg("vectors"))
      .def_property_readonly("kind", [](const Scan& s) { return Scan::kind_name(s.kind()); })
      .def_property_readonly("p", &Scan::dimension)
      .def("__len__", &Scan::length)
      .def("indices", &Scan::indices)
      .def("step", &Scan::dense_step)
      .def("to_json", [](const Scan& s) { return to_python(scan_to_json(s)); });

  m.def(
      "dobrushin_variation",
      [](const Scan& scan, const InfluenceMatrix& c, const py::object& d) {
        return dobrushin_variation(scan, weights(d, c.size()), c);
      },
      py::arg("scan"), py::arg("bound"), py::arg("d") = py::none());

  m.def(
      "dv_trace",
      [](const Scan& scan, const InfluenceMatrix& c, const py::object& d) {
        const WeightVector w = weights(d, c.size());
        return forward_coupling_bounds(scan, c, &w).running_dv();
      },
      py::arg("scan"), py::arg("bound"), py::arg("d") = py::none(),
      "d^T b_t after each step t = 1..T.");

  m.def(
      "optimize_scan",
      [](const Scan& init, const InfluenceMatrix& c, const py::object& d,
         std::optional<double> epsilon, const std::string& tie_break, bool iterate) {
        const OptimizerConfig cfg = optimizer_config(epsilon, tie_break);
        const WeightVector w = weights(d, c.size());
        return optimized_dict(iterate ? iterate_optimize(init, w, c, cfg) : optimize_scan(init, w, c, cfg),
                              cfg);
      },
      py::arg("init"), py::arg("bound"), py::arg("d") = py::none(),
      py::arg("epsilon") = py::none(), py::arg("tie_break") = "keep_incumbent",
      py::arg("iterate") = false);

  m.def(
      "length_doubling_select",
      [](const Scan& reference, const InfluenceMatrix& c, const py::object& d) {
        const OptimizedScan r = length_doubling_select(reference, weights(d, c.size()), c);
        OptimizerConfig cfg;
        cfg.epsilon = r.reference_dv;
        return optimized_dict(r, cfg);
      },
      py::arg("reference"), py::arg("bound"), py::arg("d") = py::none());

  m.def(
      "run_gibbs",
      [](const BinaryPairwiseMrf& model, const Scan& scan, const std::string& start,
         std::uint64_t seed) {
        StartSpec s;
        s.kind = parse_start_kind(start);
        return run_gibbs(model, scan, s, seed).state;
      },
      py::arg("model"), py::arg("scan"), py::arg("start") = "all_up", py::arg("seed") = 1);

  m.def(
      "estimate_expectation",
      [](const BinaryPairwiseMrf& model, const Scan& scan, std::vector<std::size_t> members,
         std::size_t replicates, std::uint64_t seed, const std::string& start,
         std::size_t threads) {
        StartSpec s;
        s.kind = parse_start_kind(start);
        const Estimate e = estimate_expectation(model, scan, Feature{std::move(members)},
                                                replicates, seed, s, threads);
        py::dict out = to_python(estimate_report(e, scan, s)).cast<py::dict>();
        out["values"] = e.values;
        return out;
      },
      py::arg("model"), py::arg("scan"), py::arg("feature"), py::arg("replicates"),
      py::arg("seed") = 1, py::arg("start") = "all_up", py::arg("threads") = 1);

  m.def("exact_distribution", [](const BinaryPairwiseMrf& model) {
    return enumerate_distribution(model).probs();
  });
  m.def(
      "exact_tv",
      [](const BinaryPairwiseMrf& model, const Scan& scan, const std::string& start) {
        std::vector<std::size_t> domains(model.size(), 2);
        const ExactDistribution mu0 =
            parse_start_kind(start) == StartSpec::Kind::uniform
                ? ExactDistribution::uniform(domains, true)
                : ExactDistribution::point_mass(domains, std::vector<int>(model.size(), 1), true);
        return exact_tv(exact_step_distribution(model, scan, mu0), enumerate_distribution(model));
      },
      py::arg("model"), py::arg("scan"), py::arg("start") = "all_up",
      "Exact TV between the chain's step-T law and the target.");
  m.def(
      "exhaustive_best_scan",
      [](const InfluenceMatrix& c, const py::object& d, std::size_t length) {
        const WeightVector w = weights(d, c.size());
        const ExhaustiveResult r = exhaustive_best_scan(c, w.values(), length);
        return py::make_tuple(r.scan, r.dv);
      },
      py::arg("bound"), py::arg("d"), py::arg("length"));

  m.def(
      "exp_scan_evaluation",
      [](std::vector<std::size_t> grid, std::vector<std::uint64_t> seeds, std::size_t rows,
         std::size_t cols, bool iterated) {
        ScanEvalConfig c;
        c.grid = std::move(grid);
        c.seeds = std::move(seeds);
        c.rows = rows;
        c.cols = cols;
        c.iterated = iterated;
        return to_python(exp_scan_evaluation(c).manifest());
      },
      py::arg("grid") = std::vector<std::size_t>{}, py::arg("seeds") = std::vector<std::uint64_t>{1},
      py::arg("rows") = 10, py::arg("cols") = 10, py::arg("iterated") = true,
      "Runs the scan evaluation and returns its manifest (config, summary, series).");
}
