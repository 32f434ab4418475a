#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "loramesh/metrics.hpp"
#include "loramesh/planner.hpp"
#include "loramesh/scenario.hpp"
#include "loramesh/simulator.hpp"

namespace loramesh {

/// Copy of `base` with the protocol replaced.
Scenario with_protocol(const Scenario& base, Protocol p);

RunMetrics run_metrics(const Scenario& scenario, std::uint64_t seed);

struct MeanStd {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation; 0 for one value
};
MeanStd mean_std(const std::vector<double>& xs);

struct CompareRow {
  std::uint64_t seed = 0;
  RunMetrics flooding;
  RunMetrics routing;
};

struct CompareReport {
  std::vector<CompareRow> rows;
  nlohmann::ordered_json summary;
};

/// Flooding vs. the scenario's routing variant on every seed. Runs in
/// parallel when `jobs` > 1.
CompareReport compare(const Scenario& scenario, const std::vector<std::uint64_t>& seeds,
                      Protocol routing_variant = Protocol::Routing, unsigned jobs = 0);

struct LoadPoint {
  double mean_interval_s = 0.0;
  std::int64_t budget = 0;
  double mean_latency_ms = 0.0;
  double pdr = 0.0;
};

struct LoadReport {
  std::vector<LoadPoint> points;
  std::vector<double> saturated_intervals;
  std::optional<double> knee_interval_s;  // largest saturated interval
  double threshold = 1.2;
};

/// For each interval, runs every budget. An interval is saturated when the
/// mean latency at the largest budget exceeds `threshold` times the mean
/// latency at the smallest.
LoadReport loadtest(const Scenario& scenario, const std::vector<double>& intervals_s,
                    const std::vector<std::int64_t>& budgets, std::uint64_t seed,
                    double threshold = 1.2, unsigned jobs = 0);

nlohmann::ordered_json load_report_to_json(const LoadReport& r);

// Offline planner file formats.
struct ReportsFile {
  std::vector<NodeId> gateways;
  std::vector<wire::NeighborReport> reports;
};
ReportsFile reports_from_json(const nlohmann::json& j);
nlohmann::ordered_json reports_to_json(const ReportsFile& f);
nlohmann::ordered_json routing_table_to_json(const GlobalGraph& g);

/// Learned per-node tables (neighbors, distance estimates, installed route).
nlohmann::ordered_json learned_to_json(const RunResult& r);

}  // namespace loramesh
