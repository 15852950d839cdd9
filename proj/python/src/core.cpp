#include <pybind11/numpy.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fcatraffic/config.hpp"
#include "fcatraffic/error.hpp"
#include "fcatraffic/fuzzy_simulator.hpp"
#include "fcatraffic/metrics.hpp"
#include "fcatraffic/nasch_simulator.hpp"

namespace py = pybind11;
using namespace fca;

namespace {

// (snapshots, channels, vehicles) copy of a flat log buffer.
template <typename T>
py::array_t<T> cube(const std::vector<T>& flat, const TrajectoryLog& log) {
  py::array_t<T> out({static_cast<py::ssize_t>(log.snapshots), static_cast<py::ssize_t>(log.channel_count()),
                      static_cast<py::ssize_t>(log.vehicles)});
  std::copy(flat.begin(), flat.end(), out.mutable_data());
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Fuzzy cellular automaton and NaSch traffic simulation core";

  // Library errors surface as fcatraffic.Error with the error kind name in .kind.
  static py::handle error_type = PyErr_NewException("fcatraffic.Error", PyExc_RuntimeError, nullptr);
  m.attr("Error") = error_type;
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = py::reinterpret_borrow<py::object>(error_type)(e.what());
      exc.attr("kind") = std::string(to_string(e.kind()));
      PyErr_SetObject(error_type.ptr(), exc.ptr());
    }
  });

  py::class_<TriangularFuzzy>(m, "TriangularFuzzy")
      .def(py::init(&TriangularFuzzy::make), py::arg("z1"), py::arg("z2"), py::arg("z3"))
      .def_property_readonly("lower", &TriangularFuzzy::lower)
      .def_property_readonly("peak", &TriangularFuzzy::peak)
      .def_property_readonly("upper", &TriangularFuzzy::upper)
      .def("components", &TriangularFuzzy::components)
      .def("membership", &TriangularFuzzy::membership, py::arg("x"))
      .def("scaled", &TriangularFuzzy::scaled, py::arg("factor"))
      .def(py::self == py::self)
      .def("__repr__", [](const TriangularFuzzy& z) {
        return "TriangularFuzzy(" + py::repr(py::float_(z.lower())).cast<std::string>() + ", " +
               py::repr(py::float_(z.peak())).cast<std::string>() + ", " +
               py::repr(py::float_(z.upper())).cast<std::string>() + ")";
      });

  py::class_<RuleTable>(m, "RuleTable")
      .def_readonly("name", &RuleTable::name)
      .def_readonly("u", &RuleTable::u)
      .def_readonly("v_max", &RuleTable::v_max)
      .def_readonly("g_stat", &RuleTable::g_stat)
      .def_property_readonly("saturation_flow_veh_h",
                             [](const RuleTable& r) { return rule_saturation_flow(r) * kStepsPerHour; });
  m.def("builtin_rule", [](const std::string& name) { return builtin_rule(name); }, py::arg("name"));
  m.def("make_custom_rule", &make_custom_rule, py::arg("name"), py::arg("u"));

  py::class_<Calibration>(m, "Calibration")
      .def_readonly("rule_low", &Calibration::rule_low)
      .def_readonly("rule_high", &Calibration::rule_high)
      .def_readonly("alpha", &Calibration::alpha);
  m.def("make_calibration", &make_calibration, py::arg("low"), py::arg("high"), py::arg("alpha"));
  m.def("calibrate_alpha", &calibrate_alpha, py::arg("saturation_veh_h"), py::arg("low"), py::arg("high"));
  m.def("saturation_of_alpha",
        py::overload_cast<const RuleTable&, const RuleTable&, double>(&saturation_of_alpha), py::arg("low"),
        py::arg("high"), py::arg("alpha"));
  m.def("alpha_for_saturation", &alpha_for_saturation, py::arg("low"), py::arg("high"), py::arg("s"));

  py::enum_<Model>(m, "Model").value("fuzzy", Model::Fuzzy).value("nasch", Model::Nasch);
  py::enum_<BoundPolicy>(m, "BoundPolicy")
      .value("strict", BoundPolicy::Strict)
      .value("count", BoundPolicy::Count);

  py::class_<SignalPlan>(m, "SignalPlan")
      .def(py::init<>())
      .def_readwrite("stop_line", &SignalPlan::stop_line)
      .def_readwrite("cycle", &SignalPlan::cycle)
      .def_readwrite("green_start", &SignalPlan::green_start)
      .def_readwrite("green_duration", &SignalPlan::green_duration);

  py::class_<Scenario>(m, "Scenario")
      .def(py::init<>())
      .def_readwrite("road_length_m", &Scenario::road_length_m)
      .def_readwrite("cell_length_m", &Scenario::cell_length_m)
      .def_readwrite("stop_lines_m", &Scenario::stop_lines_m)
      .def_readwrite("signals", &Scenario::signals)
      .def_readwrite("initial_queue_per_intersection", &Scenario::initial_queue_per_intersection)
      .def_readwrite("last_vehicle_at_first_cell", &Scenario::last_vehicle_at_first_cell)
      .def_readwrite("horizon", &Scenario::horizon)
      .def("stop_cells", &Scenario::stop_cells)
      .def("initial_positions", &Scenario::initial_positions)
      .def("vehicle_count", &Scenario::vehicle_count)
      .def("validate", &Scenario::validate)
      .def("with_cell_length", &Scenario::with_cell_length, py::arg("cell_length_m"));
  m.def("build_arterial",
        [](int queue, long cycle, long green, long offset, const std::string& model, long horizon) {
          return build_arterial(queue, cycle, green, offset, parse_model(model), horizon);
        },
        py::arg("queue_len"), py::arg("cycle") = 60, py::arg("green") = 30, py::arg("offset") = 10,
        py::arg("model") = "fuzzy", py::arg("horizon") = 3600);
  m.def("build_saturated_queue", &build_saturated_queue, py::arg("horizon"), py::arg("cell_length_m"),
        py::arg("queue_len") = -1);
  m.def("parse_config", [](const std::string& text) {
    try {
      return parse_config(nlohmann::json::parse(text));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::ConfigError, e.what());
    }
  }, py::arg("json_text"), "Scenario of a JSON config document.");
  py::class_<SimulationConfig>(m, "SimulationConfig")
      .def_readonly("scenario", &SimulationConfig::scenario)
      .def_property_readonly("calibration",
                             [](const SimulationConfig& c) { return resolve_calibration(c.model); })
      .def_property_readonly("model", [](const SimulationConfig& c) { return c.model.model; });

  py::class_<TrajectoryLog>(m, "TrajectoryLog")
      .def_readonly("model", &TrajectoryLog::model)
      .def_readonly("channels", &TrajectoryLog::channels)
      .def_readonly("vehicles", &TrajectoryLog::vehicles)
      .def_readonly("steps", &TrajectoryLog::steps)
      .def_readonly("op_count", &TrajectoryLog::op_count)
      .def_readonly("metadata", &TrajectoryLog::metadata)
      .def_property_readonly("positions", [](const TrajectoryLog& l) { return cube(l.positions, l); },
                             "Array of shape (steps + 1, channels, vehicles).")
      .def_property_readonly("velocities", [](const TrajectoryLog& l) { return cube(l.velocities, l); });

  m.def("run_fuzzy", &run_fuzzy, py::arg("scenario"), py::arg("calibration"),
        py::arg("policy") = BoundPolicy::Strict, py::call_guard<py::gil_scoped_release>());
  m.def("run_nasch",
        [](const Scenario& s, int v_max, double p, std::uint64_t seed) {
          return run_nasch(s, NaschParams{v_max, p}, seed);
        },
        py::arg("scenario"), py::arg("v_max") = 2, py::arg("p") = 0.2, py::arg("seed") = 0,
        py::call_guard<py::gil_scoped_release>());

  m.def("fuzzy_travel_time", &fuzzy_travel_time, py::arg("log"), py::arg("vehicle"), py::arg("stop_cell"));
  m.def("component_travel_times", &component_travel_times, py::arg("log"), py::arg("vehicle"),
        py::arg("stop_cell"));
  m.def("fuzzy_vehicle_count", &fuzzy_vehicle_count, py::arg("log"), py::arg("t"), py::arg("boundary_cell"));

  m.def("queue_discharge_trace",
        [](const RuleTable& rule, int queue, long steps) {
          const auto tr = queue_discharge_trace(rule, queue, steps);
          py::dict d;
          d["steady"] = tr.steady;
          d["v_max"] = tr.steady_velocity;
          d["gap"] = tr.steady_gap;
          d["saturation_flow_veh_h"] = tr.saturation_flow_veh_h();
          d["first_cell"] = tr.first_cell;
          d["states"] = tr.states;
          return d;
        },
        py::arg("rule"), py::arg("queue_len"), py::arg("steps"));
  m.def("fuzzy_queue_saturation_flow", &fuzzy_queue_saturation_flow, py::arg("calibration"),
        py::arg("horizon") = 3600, py::call_guard<py::gil_scoped_release>());
  m.def("nasch_saturation_samples",
        [](int v_max, double p, int runs, long horizon, std::uint64_t seed, unsigned threads) {
          return nasch_saturation_samples(NaschParams{v_max, p}, runs, horizon, seed, threads);
        },
        py::arg("v_max") = 2, py::arg("p") = 0.2, py::arg("runs") = 500, py::arg("horizon") = 3600,
        py::arg("seed") = 0, py::arg("threads") = 0, py::call_guard<py::gil_scoped_release>());

  py::class_<PercentileSummary>(m, "PercentileSummary")
      .def_readonly("min", &PercentileSummary::min)
      .def_readonly("p05", &PercentileSummary::p05)
      .def_readonly("median", &PercentileSummary::median)
      .def_readonly("p95", &PercentileSummary::p95)
      .def_readonly("max", &PercentileSummary::max)
      .def_property_readonly("spread", &PercentileSummary::spread);
  m.def("summarize", &summarize, py::arg("samples"));
  m.def("percentile", &percentile, py::arg("samples"), py::arg("q"));

  m.attr("FUZZY_CELL_LENGTH") = kFuzzyCellLength;
  m.attr("NASCH_CELL_LENGTH") = kNaschCellLength;
  m.attr("__version__") = FCA_VERSION;
}
