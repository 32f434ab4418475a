#include "loramesh/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <future>
#include <thread>

namespace loramesh {

Scenario with_protocol(const Scenario& base, Protocol p) {
  Scenario s = base;
  s.protocol = p;
  return s;
}

RunMetrics run_metrics(const Scenario& scenario, std::uint64_t seed) {
  RunResult r = simulate(scenario, seed);
  return compute_metrics(r.trace, r.roles);
}

MeanStd mean_std(const std::vector<double>& xs) {
  MeanStd out;
  if (xs.empty()) return out;
  double sum = 0.0;
  for (double x : xs) sum += x;
  out.mean = sum / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - out.mean) * (x - out.mean);
    out.stddev = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return out;
}

namespace {

/// Runs tasks with at most `jobs` in flight; results keep task order.
template <class T>
std::vector<T> run_parallel(std::vector<std::function<T()>> tasks, unsigned jobs) {
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  std::vector<T> out(tasks.size());
  std::size_t next = 0;
  while (next < tasks.size()) {
    std::vector<std::future<T>> batch;
    const std::size_t begin = next;
    for (; next < tasks.size() && next - begin < jobs; ++next)
      batch.push_back(std::async(std::launch::async, tasks[next]));
    for (std::size_t k = 0; k < batch.size(); ++k) out[begin + k] = batch[k].get();
  }
  return out;
}

nlohmann::ordered_json ms_json(const MeanStd& m) {
  return {{"mean", m.mean}, {"stddev", m.stddev}};
}

}  // namespace

CompareReport compare(const Scenario& scenario, const std::vector<std::uint64_t>& seeds,
                      Protocol routing_variant, unsigned jobs) {
  const Scenario flood = with_protocol(scenario, Protocol::Flooding);
  const Scenario route = with_protocol(scenario, routing_variant);
  std::vector<std::function<RunMetrics()>> tasks;
  for (auto seed : seeds) {
    tasks.push_back([&flood, seed] { return run_metrics(flood, seed); });
    tasks.push_back([&route, seed] { return run_metrics(route, seed); });
  }
  auto results = run_parallel(std::move(tasks), jobs);

  CompareReport rep;
  for (std::size_t k = 0; k < seeds.size(); ++k)
    rep.rows.push_back({seeds[k], std::move(results[2 * k]), std::move(results[2 * k + 1])});

  auto collect = [&](auto f) {
    std::vector<double> fl, ro;
    for (const auto& row : rep.rows) {
      fl.push_back(f(row.flooding));
      ro.push_back(f(row.routing));
    }
    return std::pair{mean_std(fl), mean_std(ro)};
  };
  auto block = [&](const char* name, auto f) {
    auto [fl, ro] = collect(f);
    rep.summary[name] = {{"flooding", ms_json(fl)},
                         {"routing", ms_json(ro)},
                         {"delta", ro.mean - fl.mean},
                         {"ratio", fl.mean != 0.0 ? ro.mean / fl.mean : 0.0}};
  };
  block("pdr", [](const RunMetrics& m) { return m.pdr.value_or(0.0); });
  block("latency_mean_ms", [](const RunMetrics& m) { return m.latency ? m.latency->mean_ms : 0.0; });
  block("max_duty_cycle_pct", [](const RunMetrics& m) { return m.max_repeater_duty(); });
  block("repeater_energy_mah", [](const RunMetrics& m) { return m.repeater_energy_mah; });
  rep.summary["routing_variant"] = to_string(routing_variant);
  rep.summary["seeds"] = seeds;
  return rep;
}

LoadReport loadtest(const Scenario& scenario, const std::vector<double>& intervals_s,
                    const std::vector<std::int64_t>& budgets, std::uint64_t seed,
                    double threshold, unsigned jobs) {
  if (intervals_s.empty() || budgets.empty()) throw ConfigError("load ladders must be nonempty");
  for (std::size_t k = 1; k < intervals_s.size(); ++k)
    if (!(intervals_s[k] < intervals_s[k - 1]))
      throw ConfigError("interval ladder must be strictly descending");
  std::vector<std::int64_t> sorted_budgets = budgets;
  std::sort(sorted_budgets.begin(), sorted_budgets.end());

  std::vector<std::function<LoadPoint()>> tasks;
  for (double iv : intervals_s) {
    for (auto b : sorted_budgets) {
      tasks.push_back([&scenario, iv, b, seed] {
        Scenario s = scenario;
        s.traffic.mean_interval_s = iv;
        s.traffic.packets = b;
        s.traffic.scripted.clear();
        const RunMetrics m = run_metrics(s, seed);
        return LoadPoint{iv, b, m.latency ? m.latency->mean_ms : 0.0, m.pdr.value_or(0.0)};
      });
    }
  }
  LoadReport rep;
  rep.threshold = threshold;
  rep.points = run_parallel(std::move(tasks), jobs);
  const std::size_t nb = sorted_budgets.size();
  for (std::size_t i = 0; i < intervals_s.size(); ++i) {
    const LoadPoint& lo = rep.points[i * nb];
    const LoadPoint& hi = rep.points[i * nb + nb - 1];
    if (hi.mean_latency_ms > threshold * lo.mean_latency_ms) {
      rep.saturated_intervals.push_back(intervals_s[i]);
      if (!rep.knee_interval_s || intervals_s[i] > *rep.knee_interval_s)
        rep.knee_interval_s = intervals_s[i];
    }
  }
  return rep;
}

nlohmann::ordered_json load_report_to_json(const LoadReport& r) {
  nlohmann::ordered_json j;
  j["threshold"] = r.threshold;
  j["points"] = nlohmann::ordered_json::array();
  for (const auto& p : r.points)
    j["points"].push_back({{"mean_interval_s", p.mean_interval_s},
                           {"budget", p.budget},
                           {"mean_latency_ms", p.mean_latency_ms},
                           {"pdr", p.pdr}});
  j["saturated_intervals_s"] = r.saturated_intervals;
  j["knee_interval_s"] =
      r.knee_interval_s ? nlohmann::ordered_json(*r.knee_interval_s) : nlohmann::ordered_json(nullptr);
  return j;
}

ReportsFile reports_from_json(const nlohmann::json& j) {
  ReportsFile f;
  try {
    for (const auto& g : j.at("gateways")) f.gateways.push_back(g.get<NodeId>());
    for (const auto& r : j.at("reports")) {
      wire::NeighborReport rep;
      rep.reporter = r.at("reporter").get<NodeId>();
      rep.chunk_index = r.value("chunk", 0);
      for (const auto& e : r.at("neighbors"))
        rep.entries.push_back({e.at("uid").get<NodeId>(), e.at("distance_m").get<double>()});
      f.reports.push_back(std::move(rep));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed reports file: ") + e.what());
  }
  if (f.reports.empty()) throw ConfigError("reports file contains no reports");
  return f;
}

nlohmann::ordered_json reports_to_json(const ReportsFile& f) {
  nlohmann::ordered_json j;
  j["gateways"] = f.gateways;
  j["reports"] = nlohmann::ordered_json::array();
  for (const auto& r : f.reports) {
    nlohmann::ordered_json rj;
    rj["reporter"] = r.reporter;
    rj["chunk"] = r.chunk_index;
    rj["neighbors"] = nlohmann::ordered_json::array();
    for (const auto& e : r.entries)
      rj["neighbors"].push_back({{"uid", e.neighbor}, {"distance_m", e.distance_m}});
    j["reports"].push_back(rj);
  }
  return j;
}

nlohmann::ordered_json routing_table_to_json(const GlobalGraph& g) {
  using nlohmann::ordered_json;
  ordered_json rows = ordered_json::array();
  for (const auto& [uid, v] : g.vertices) {
    ordered_json r;
    r["uid"] = uid;
    r["gateway"] = v.gateway;
    r["distance_value"] =
        std::isfinite(v.distance_value) ? ordered_json(v.distance_value) : ordered_json(nullptr);
    r["upstream"] = v.upstream == kNoNode ? ordered_json(nullptr) : ordered_json(v.upstream);
    r["nearest_gateway"] =
        v.nearest_gateway == kNoNode ? ordered_json(nullptr) : ordered_json(v.nearest_gateway);
    r["downstream"] = v.downstream;
    rows.push_back(r);
  }
  ordered_json j;
  j["rows"] = rows;
  j["warnings"] = g.warnings;
  return j;
}

nlohmann::ordered_json learned_to_json(const RunResult& r) {
  using nlohmann::ordered_json;
  ordered_json nodes = ordered_json::array();
  for (const auto& [uid, t] : r.learned) {
    ordered_json n;
    n["uid"] = uid;
    n["role"] = to_string(r.roles.at(uid));
    n["distance_value"] =
        t.own_distance_value ? ordered_json(*t.own_distance_value) : ordered_json(nullptr);
    n["upstream"] = t.upstream == kNoNode ? ordered_json(nullptr) : ordered_json(t.upstream);
    n["downstream"] = std::vector<NodeId>(t.downstream.begin(), t.downstream.end());
    ordered_json nbs = ordered_json::array();
    for (const auto& [nb, rec] : t.neighbors) {
      nbs.push_back({{"uid", nb},
                     {"samples", rec.samples},
                     {"avg_prx_dbm", rec.avg_prx_dbm},
                     {"est_distance_m", rec.est_distance_m},
                     {"distance_value", rec.distance_value ? ordered_json(*rec.distance_value)
                                                           : ordered_json(nullptr)}});
    }
    n["neighbors"] = nbs;
    nodes.push_back(n);
  }
  ordered_json j;
  j["nodes"] = nodes;
  j["plan"] = routing_table_to_json(r.plan);
  j["warnings"] = r.warnings;
  return j;
}

}  // namespace loramesh
