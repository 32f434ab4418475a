#include <sstream>
#include <string>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "loramesh/experiments.hpp"
#include "loramesh/learning.hpp"
#include "loramesh/metrics.hpp"
#include "loramesh/planner.hpp"
#include "loramesh/scenario.hpp"
#include "loramesh/simulator.hpp"
#include "loramesh/trace.hpp"

namespace py = pybind11;
using namespace loramesh;

namespace {

// Documents cross the boundary as JSON text; the Python layer decodes them.
Scenario scenario_arg(const std::string& path, const std::string& protocol, std::int64_t packets) {
  Scenario s = load_scenario(path);
  if (!protocol.empty()) s.protocol = protocol_from_string(protocol);
  if (packets >= 0) s.traffic.packets = packets;
  s.validate();
  return s;
}

py::dict run(const std::string& path, std::uint64_t seed, const std::string& protocol,
             std::int64_t packets, bool with_trace) {
  const Scenario s = scenario_arg(path, protocol, packets);
  RunResult r;
  {
    py::gil_scoped_release release;
    r = simulate(s, seed);
  }
  py::dict out;
  out["metrics"] = metrics_to_json(compute_metrics(r.trace, r.roles)).dump();
  out["trace_digest"] = hex_digest(trace_digest(r.trace));
  out["warnings"] = r.warnings;
  if (with_trace) {
    std::ostringstream os;
    write_ndjson(os, r.trace);
    out["trace"] = os.str();
  }
  return out;
}

std::string plan_reports(const std::string& reports_json) {
  const ReportsFile f = reports_from_json(nlohmann::json::parse(reports_json));
  GlobalGraph g = aggregate(f.gateways, f.reports);
  plan(g);
  return routing_table_to_json(g).dump();
}

std::string compare_json(const std::string& path, std::vector<std::uint64_t> seeds, std::int64_t packets,
                         unsigned jobs) {
  const Scenario s = scenario_arg(path, "", packets);
  if (seeds.empty()) seeds = s.seeds;
  CompareReport rep;
  {
    py::gil_scoped_release release;
    rep = compare(s, seeds, s.protocol == Protocol::Flooding ? Protocol::Routing : s.protocol, jobs);
  }
  return rep.summary.dump();
}

std::string loadtest_json(const std::string& path, const std::string& protocol,
                          const std::vector<double>& intervals, const std::vector<std::int64_t>& budgets,
                          std::uint64_t seed, double threshold, unsigned jobs) {
  const Scenario s = scenario_arg(path, protocol, -1);
  LoadReport rep;
  {
    py::gil_scoped_release release;
    rep = loadtest(s, intervals, budgets, seed, threshold, jobs);
  }
  return load_report_to_json(rep).dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Subterranean LoRa mesh simulator core";
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  m.def("airtime", [](int payload, int sf, int bw, int cr) {
    RadioConfig c;
    c.spreading_factor = sf;
    c.bandwidth_hz = bw;
    c.coding_rate_denominator = cr;
    return airtime(c, payload);
  }, py::arg("payload_bytes"), py::arg("spreading_factor") = 7, py::arg("bandwidth_hz") = 500'000,
        py::arg("coding_rate_denominator") = 5);

  m.def("received_power", [](double distance_m, double tx_power_dbm, double exponent) {
    PathLossModel pl;
    pl.exponent = exponent;
    return *received_power(tx_power_dbm, pl, distance_m);
  }, py::arg("distance_m"), py::arg("tx_power_dbm") = 14.0, py::arg("exponent") = 2.5);

  m.def("estimate_distance", [](double rx_power_dbm, double tx_power_dbm, double exponent) {
    PathLossModel pl;
    pl.exponent = exponent;
    return estimate_distance(tx_power_dbm, rx_power_dbm, pl).distance_m;
  }, py::arg("rx_power_dbm"), py::arg("tx_power_dbm") = 14.0, py::arg("exponent") = 2.5);

  m.def("case1_triggers", &case1_triggers, py::arg("battery_f"), py::arg("level_e"),
        py::arg("level_e_next"));
  m.def("case2_triggers", &case2_triggers, py::arg("battery_d"), py::arg("level_e"));

  m.def("simulate", &run, py::arg("scenario"), py::arg("seed") = 1, py::arg("protocol") = "",
        py::arg("packets") = -1, py::arg("with_trace") = false);
  m.def("plan", &plan_reports, py::arg("reports_json"));
  m.def("compare", &compare_json, py::arg("scenario"), py::arg("seeds") = std::vector<std::uint64_t>{},
        py::arg("packets") = -1, py::arg("jobs") = 0);
  m.def("loadtest", &loadtest_json, py::arg("scenario"), py::arg("protocol") = "",
        py::arg("intervals"), py::arg("budgets"), py::arg("seed") = 1, py::arg("threshold") = 1.2,
        py::arg("jobs") = 0);
}
