#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "covreg/checker.hpp"
#include "covreg/scenario.hpp"
#include "covreg/seqreg.hpp"

namespace py = pybind11;
using namespace covreg;

namespace {

Value to_value(const py::bytes& b) {
  std::string s = b;
  return Value(s.begin(), s.end());
}

py::bytes to_bytes(const Value& v) {
  return py::bytes(reinterpret_cast<const char*>(v.data()), v.size());
}

}  // namespace

PYBIND11_MODULE(_covreg, m) {
  m.doc() = "coverable versioned register toolkit";

  py::class_<Tag>(m, "Tag")
      .def(py::init<>())
      .def(py::init([](std::uint64_t ts, ProcessId wid) { return Tag{ts, wid}; }),
           py::arg("ts"), py::arg("wid"))
      .def_readwrite("ts", &Tag::ts)
      .def_readwrite("wid", &Tag::wid)
      .def(py::self == py::self)
      .def(py::self < py::self)
      .def("__repr__", [](const Tag& t) { return to_string(t); });

  m.attr("TAG0") = kTag0;
  m.def("tag_successor", &tag_successor, py::arg("tag"), py::arg("writer"));

  py::class_<WriteOutcome>(m, "WriteOutcome")
      .def_property_readonly("value", [](const WriteOutcome& o) { return to_bytes(o.value); })
      .def_readonly("tag", &WriteOutcome::tag)
      .def_property_readonly("changed", &WriteOutcome::changed)
      .def("__repr__", [](const WriteOutcome& o) {
        return "WriteOutcome(" + to_hex(o.value) + ", " + to_string(o.tag) + ", " +
               std::string(to_string(o.flag)) + ")";
      });

  py::class_<SeqRegister>(m, "SeqRegister")
      .def(py::init([](const py::bytes& initial) { return SeqRegister(to_value(initial)); }),
           py::arg("initial") = py::bytes(""))
      .def("write",
           [](SeqRegister& r, const py::bytes& v, const Tag& ver, ProcessId w) {
             return r.write(to_value(v), ver, w);
           },
           py::arg("value"), py::arg("ver"), py::arg("writer"))
      .def("read", [](const SeqRegister& r) {
        auto [v, t] = r.read();
        return py::make_tuple(to_bytes(v), t);
      });

  py::class_<Verdict>(m, "Verdict")
      .def_readonly("property", &Verdict::property)
      .def_readonly("passed", &Verdict::pass)
      .def_readonly("detail", &Verdict::detail)
      .def_property_readonly("counterexample",
                             [](const Verdict& v) { return emit_history(v.counterexample); })
      .def("__bool__", [](const Verdict& v) { return v.pass; })
      .def("__repr__", [](const Verdict& v) {
        return (v.pass ? "PASS " : "FAIL ") + v.property +
               (v.detail.empty() ? "" : ": " + v.detail);
      });

  m.def("check", [](const std::string& history_text, const std::string& property) {
    return check_property(property, parse_history(history_text));
  }, py::arg("history"), py::arg("property"));

  m.def("check_all", [](const std::string& history_text, bool include_strong) {
    return check_all(parse_history(history_text), include_strong);
  }, py::arg("history"), py::arg("include_strong") = false);

  m.def("brute_force_linearizable", [](const std::string& history_text) {
    return brute_force_linearizable(parse_history(history_text));
  }, py::arg("history"));

  m.def("simulate",
        [](const std::string& protocol, std::uint64_t seed, std::uint32_t replicas,
           std::uint32_t writers, std::uint32_t readers, std::uint32_t ops,
           std::uint32_t crashes, std::int64_t delay_bound) {
          ScenarioConfig cfg;
          cfg.protocol = protocol_from_string(protocol);
          cfg.sim.seed = seed;
          cfg.sim.replicas = replicas;
          cfg.sim.writers = writers;
          cfg.sim.readers = readers;
          cfg.sim.ops_per_client = ops;
          cfg.sim.crashes = crashes;
          if (delay_bound >= 0) cfg.sim.delay_bound = static_cast<std::uint64_t>(delay_bound);
          RunResult run = run_scenario(cfg);
          if (!run.incomplete.empty())
            throw std::runtime_error("simulation did not quiesce");
          return emit_history(run.history);
        },
        py::arg("protocol") = "vmwabd", py::arg("seed") = 0, py::arg("replicas") = 3,
        py::arg("writers") = 1, py::arg("readers") = 0, py::arg("ops") = 1,
        py::arg("crashes") = 0, py::arg("delay_bound") = -1);
}
