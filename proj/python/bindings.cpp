#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "plurality/engine.hpp"
#include "plurality/harness.hpp"
#include "plurality/standalone.hpp"

namespace py = pybind11;
using namespace plurality;

namespace {

DistributionSpec distribution(const std::string& family, std::vector<std::uint32_t> x, double alpha) {
  DistributionSpec d;
  d.family = parse_distribution_family(family);
  d.x = std::move(x);
  d.alpha = alpha;
  return d;
}

py::dict result_dict(const TrialResult& r) {
  py::dict d;
  d["seed"] = r.rng_seed;
  d["n"] = r.n;
  d["winner"] = r.winner;
  d["correct"] = r.correct;
  d["timeout"] = r.timeout;
  d["interactions"] = r.interactions_total;
  d["parallel_time"] = r.parallel_time();
  py::dict milestones;
  for (const auto& [name, at] : r.milestones) milestones[py::str(name)] = at;
  d["milestones"] = milestones;
  py::list violations;
  for (const auto& v : r.invariant_violations) violations.append(py::make_tuple(v.interaction, v.description));
  d["violations"] = violations;
  d["tournaments_started"] = r.tournaments_started;
  d["challengers"] = r.challengers;
  if (r.handoff) {
    py::dict h;
    h["surviving"] = r.handoff->surviving;
    h["tokens"] = r.handoff->tokens;
    d["handoff"] = h;
  } else {
    d["handoff"] = py::none();
  }
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Population-protocol plurality consensus simulator";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  py::enum_<Variant>(m, "Variant")
      .value("ORDERED", Variant::Ordered)
      .value("UNORDERED", Variant::Unordered)
      .value("IMPROVED", Variant::Improved);

  py::class_<ProtocolConfig>(m, "ProtocolConfig")
      .def(py::init<>())
      .def_readwrite("variant", &ProtocolConfig::variant)
      .def_readwrite("n", &ProtocolConfig::n)
      .def_readwrite("k", &ProtocolConfig::k)
      .def_readwrite("x", &ProtocolConfig::x)
      .def_readwrite("max_interactions", &ProtocolConfig::max_interactions)
      .def_readwrite("allow_tie", &ProtocolConfig::allow_tie)
      .def("validate", &ProtocolConfig::validate)
      .def("canonical", &ProtocolConfig::canonical)
      .def("plurality_opinion", &ProtocolConfig::plurality_opinion);

  m.def(
      "make_distribution",
      [](const std::string& family, std::uint32_t n, std::uint32_t k, std::vector<std::uint32_t> x, double alpha) {
        return make_distribution(distribution(family, std::move(x), alpha), n, k);
      },
      py::arg("family"), py::arg("n"), py::arg("k"), py::arg("x") = std::vector<std::uint32_t>{},
      py::arg("alpha") = 0.5);

  m.def(
      "make_config",
      [](Variant variant, std::uint32_t n, std::uint32_t k, const std::string& dist, std::vector<std::uint32_t> x,
         double alpha) { return make_config(variant, n, k, distribution(dist, std::move(x), alpha)); },
      py::arg("variant"), py::arg("n"), py::arg("k"), py::arg("dist") = "bias-one",
      py::arg("x") = std::vector<std::uint32_t>{}, py::arg("alpha") = 0.5);

  m.def("config_fingerprint", &config_fingerprint);

  m.def(
      "run_trial",
      [](const ProtocolConfig& c, std::uint64_t seed) {
        TrialResult r;
        {
          py::gil_scoped_release release;
          r = run_trial(c, seed);
        }
        return result_dict(r);
      },
      py::arg("config"), py::arg("seed"));

  py::class_<Simulation>(m, "Simulation")
      .def(py::init<const ProtocolConfig&, std::uint64_t>(), py::arg("config"), py::arg("seed"))
      .def("step", &Simulation::step)
      .def("run_until", &Simulation::run_until, py::call_guard<py::gil_scoped_release>())
      .def_property_readonly("finished", &Simulation::finished)
      .def_property_readonly("interactions", &Simulation::interactions)
      .def("result", [](const Simulation& s) { return result_dict(s.result()); });

  m.def(
      "run_experiment",
      [](const std::string& config_text, unsigned workers) {
        const ExperimentSpec spec = parse_config(config_text);
        std::vector<ResultsRow> rows;
        {
          py::gil_scoped_release release;
          rows = run_experiment(spec, workers ? workers : worker_count());
        }
        py::list out;
        const auto& cols = results_columns();
        for (const auto& row : rows) {
          py::dict d;
          for (std::size_t i = 0; i < cols.size(); ++i) d[cols[i].name] = row.values[i];
          out.append(d);
        }
        return out;
      },
      py::arg("config_text"), py::arg("workers") = 0,
      "Runs a key=value experiment config; returns one dict per trial with string values.");

  m.def("load_balance_step", &load_balance_step);

  m.def(
      "run_majority",
      [](std::uint32_t a, std::uint32_t b, std::uint32_t players, std::uint64_t seed) {
        const MajorityRun r = run_majority(a, b, players, default_majority_schedule(players), seed);
        return py::make_tuple(to_string(r.consensus), r.unanimous);
      },
      py::arg("a"), py::arg("b"), py::arg("players"), py::arg("seed"));

  m.def(
      "run_junta",
      [](std::uint32_t x, unsigned ell_max, std::uint64_t interactions, std::uint64_t seed) {
        return run_junta(x, ell_max, interactions, seed).junta_size;
      },
      py::arg("x"), py::arg("ell_max"), py::arg("interactions"), py::arg("seed"));
}
