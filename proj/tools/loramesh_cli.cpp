#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "loramesh/experiments.hpp"
#include "loramesh/metrics.hpp"
#include "loramesh/planner.hpp"
#include "loramesh/scenario.hpp"
#include "loramesh/simulator.hpp"
#include "loramesh/trace.hpp"

namespace fs = std::filesystem;
using namespace loramesh;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct Common {
  std::string scenario;
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
  std::string protocol;
  std::optional<std::int64_t> packets;
  std::optional<double> mean_interval_ms;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--scenario", c.scenario, "Scenario JSON file")->required();
  cmd->add_option("--seed", c.seed, "Run seed (default: $LORAMESH_SEED, then the scenario's first seed)");
  cmd->add_option("--out-dir", c.out_dir, "Output directory");
  cmd->add_option("--protocol", c.protocol, "flooding | routing | routing_no_energy");
  cmd->add_option("--packets", c.packets, "Total uplink packet budget");
  cmd->add_option("--mean-interval-ms", c.mean_interval_ms, "Mean per-ED interval");
}

Scenario load(const Common& c) {
  Scenario s = load_scenario(c.scenario);
  if (!c.protocol.empty()) s.protocol = protocol_from_string(c.protocol);
  if (c.packets) {
    if (*c.packets < 0) throw ConfigError("--packets must be >= 0");
    s.traffic.packets = *c.packets;
  }
  if (c.mean_interval_ms) s.traffic.mean_interval_s = *c.mean_interval_ms / 1000.0;
  s.validate();
  return s;
}

std::uint64_t resolve_seed(const Common& c, const Scenario& s) {
  if (c.seed) return *c.seed;
  if (const char* env = std::getenv("LORAMESH_SEED")) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw ConfigError(std::string("LORAMESH_SEED is not an integer: ") + env);
    }
  }
  return s.seeds.empty() ? 1 : s.seeds.front();
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << content;
}

template <class T>
std::string dump(const T& j) {
  return j.dump(2) + "\n";
}

int cmd_simulate(const Common& c) {
  const Scenario s = load(c);
  const std::uint64_t seed = resolve_seed(c, s);
  fs::create_directories(c.out_dir);
  const RunResult r = simulate(s, seed);
  const RunMetrics m = compute_metrics(r.trace, r.roles);
  std::ostringstream trace;
  write_ndjson(trace, r.trace);
  write_file(fs::path(c.out_dir) / "metrics.json", metrics_to_string(m));
  write_file(fs::path(c.out_dir) / "trace.ndjson", trace.str());
  write_file(fs::path(c.out_dir) / "battery.csv", battery_csv(m));
  for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
  std::cout << s.name << " protocol=" << to_string(s.protocol) << " seed=" << seed
            << " generated=" << m.generated << " delivered=" << m.delivered << " pdr="
            << (m.pdr ? std::to_string(*m.pdr) : "null") << " latency_ms="
            << (m.latency ? std::to_string(m.latency->mean_ms) : "null")
            << " trace_digest=" << hex_digest(trace_digest(r.trace)) << "\n";
  return 0;
}

int cmd_learn(const Common& c) {
  Scenario s = load(c);
  s.protocol = s.protocol == Protocol::Flooding ? Protocol::Routing : s.protocol;
  s.learning.mode = LearningMode::InSim;
  s.traffic.packets = 0;
  s.traffic.scripted.clear();
  s.traffic.downlink_at_s.clear();
  const std::uint64_t seed = resolve_seed(c, s);
  fs::create_directories(c.out_dir);
  const RunResult r = simulate(s, seed);
  ReportsFile reports;
  for (const auto& [uid, role] : r.roles)
    if (role == Role::Gateway) reports.gateways.push_back(uid);
  reports.reports = r.reports;
  write_file(fs::path(c.out_dir) / "learned.json", dump(learned_to_json(r)));
  write_file(fs::path(c.out_dir) / "reports.json", dump(reports_to_json(reports)));
  for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
  std::cout << "learned tables for " << r.learned.size() << " nodes; " << r.routing_nodes.size()
            << " repeaters routable\n";
  return 0;
}

int cmd_plan(const std::string& reports_path, const std::string& out) {
  std::ifstream in(reports_path);
  if (!in) throw ConfigError("cannot open " + reports_path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(reports_path + ": " + e.what());
  }
  const ReportsFile f = reports_from_json(j);
  GlobalGraph g = aggregate(f.gateways, f.reports);
  plan(g);
  for (const auto& w : g.warnings) std::cerr << "warning: " << w << "\n";
  const auto unreachable = g.unreachable();
  if (!unreachable.empty()) {
    std::ostringstream os;
    os << "nodes not connected to any gateway:";
    for (NodeId u : unreachable) os << ' ' << u;
    throw ConfigError(os.str());
  }
  const std::string text = dump(routing_table_to_json(g));
  if (out.empty())
    std::cout << text;
  else
    write_file(out, text);
  return 0;
}

std::vector<double> parse_doubles(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw ConfigError("not a number: '" + item + "'");
    }
  }
  return out;
}

int cmd_loadtest(const Common& c, const std::string& intervals, const std::string& budgets,
                 double threshold, unsigned jobs) {
  const Scenario s = load(c);
  const std::uint64_t seed = resolve_seed(c, s);
  std::vector<std::int64_t> b;
  for (double x : parse_doubles(budgets)) b.push_back(static_cast<std::int64_t>(x));
  const LoadReport rep = loadtest(s, parse_doubles(intervals), b, seed, threshold, jobs);
  fs::create_directories(c.out_dir);
  auto j = load_report_to_json(rep);
  j["protocol"] = to_string(s.protocol);
  j["seed"] = seed;
  write_file(fs::path(c.out_dir) / "loadtest.json", dump(j));
  for (const auto& p : rep.points)
    std::cout << "interval_s=" << p.mean_interval_s << " budget=" << p.budget
              << " latency_ms=" << p.mean_latency_ms << " pdr=" << p.pdr << "\n";
  std::cout << "knee_interval_s="
            << (rep.knee_interval_s ? std::to_string(*rep.knee_interval_s) : "none") << "\n";
  return 0;
}

int cmd_compare(const Common& c, std::vector<std::uint64_t> seeds, unsigned jobs) {
  const Scenario s = load(c);
  if (seeds.empty()) seeds = s.seeds;
  if (seeds.empty()) throw ConfigError("compare needs at least one seed");
  const Protocol variant = s.protocol == Protocol::Flooding ? Protocol::Routing : s.protocol;
  const CompareReport rep = compare(s, seeds, variant, jobs);
  fs::create_directories(c.out_dir);
  nlohmann::ordered_json j;
  j["summary"] = rep.summary;
  j["runs"] = nlohmann::ordered_json::array();
  for (const auto& row : rep.rows)
    j["runs"].push_back({{"seed", row.seed},
                         {"flooding", metrics_to_json(row.flooding)},
                         {"routing", metrics_to_json(row.routing)}});
  write_file(fs::path(c.out_dir) / "compare.json", dump(j));
  std::cout << "metric flooding routing delta\n";
  for (const char* k : {"pdr", "latency_mean_ms", "max_duty_cycle_pct", "repeater_energy_mah"}) {
    const auto& b = rep.summary[k];
    std::cout << k << " " << b["flooding"]["mean"].get<double>() << "+-"
              << b["flooding"]["stddev"].get<double>() << " " << b["routing"]["mean"].get<double>()
              << "+-" << b["routing"]["stddev"].get<double>() << " " << b["delta"].get<double>()
              << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Subterranean LoRa mesh simulator"};
  app.require_subcommand(1);

  Common sim, learn, load_c, cmp;
  auto* s_cmd = app.add_subcommand("simulate", "Run one scenario and export metrics and trace");
  add_common(s_cmd, sim);
  auto* l_cmd = app.add_subcommand("learn", "Run the learning phase and export learned tables");
  add_common(l_cmd, learn);

  std::string reports, plan_out;
  auto* p_cmd = app.add_subcommand("plan", "Build routing tables from neighbor reports");
  p_cmd->add_option("--reports", reports, "Reports JSON file")->required();
  p_cmd->add_option("--out", plan_out, "Output file (default: stdout)");

  std::string intervals = "3.0,2.0,1.5,1.0,0.7,0.5", budgets = "2000,5000,10000";
  double threshold = 1.2;
  unsigned jobs = 0;
  auto* lt_cmd = app.add_subcommand("loadtest", "Latency vs. budget over an interval ladder");
  add_common(lt_cmd, load_c);
  lt_cmd->add_option("--intervals", intervals, "Descending mean intervals in seconds");
  lt_cmd->add_option("--budgets", budgets, "Packet budgets");
  lt_cmd->add_option("--threshold", threshold, "Latency growth factor marking saturation");
  lt_cmd->add_option("--jobs", jobs, "Parallel runs (0 = hardware threads)");

  std::vector<std::uint64_t> seeds;
  unsigned cmp_jobs = 0;
  auto* c_cmd = app.add_subcommand("compare", "Flooding vs. routing across seeds");
  add_common(c_cmd, cmp);
  c_cmd->add_option("--seeds", seeds, "Seeds (default: the scenario's list)")->delimiter(',');
  c_cmd->add_option("--jobs", cmp_jobs, "Parallel runs (0 = hardware threads)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }

  try {
    if (*s_cmd) return cmd_simulate(sim);
    if (*l_cmd) return cmd_learn(learn);
    if (*p_cmd) return cmd_plan(reports, plan_out);
    if (*lt_cmd) return cmd_loadtest(load_c, intervals, budgets, threshold, jobs);
    if (*c_cmd) return cmd_compare(cmp, seeds, cmp_jobs);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}
