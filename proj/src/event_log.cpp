#include "wfsim/event_log.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include "wfsim/designs.hpp"
#include "wfsim/errors.hpp"

namespace wfsim {

bool is_known_overhead(const std::string& name) {
  static const char* const kNames[] = {"dataset_discovery", "scheduler", "setup",
                                       "distribute",        "bootstrap", "teardown"};
  return std::find(std::begin(kNames), std::end(kNames), name) != std::end(kNames);
}

double EventLog::origin() const {
  double t = std::numeric_limits<double>::infinity();
  for (const auto& r : records) t = std::min(t, r.t_submit);
  for (const auto& s : overhead_spans) t = std::min(t, s.t_start);
  return std::isinf(t) ? 0.0 : t;
}

double EventLog::horizon() const {
  double t = -std::numeric_limits<double>::infinity();
  for (const auto& r : records) t = std::max(t, r.t_end);
  for (const auto& s : overhead_spans) t = std::max(t, s.t_end);
  return std::isinf(t) ? 0.0 : t;
}

namespace {

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace

void write_events_csv(std::ostream& out, const EventLog& log) {
  out << kEventsCsvHeader << '\n';
  for (const auto& r : log.records) {
    out << r.task_id << ',' << r.item_id << ',' << to_string(r.stage) << ',' << r.node_id << ','
        << fixed6(r.size_mb) << ',' << fixed6(r.t_submit) << ',' << fixed6(r.t_start) << ','
        << fixed6(r.t_end) << '\n';
  }
}

void write_overheads_csv(std::ostream& out, const EventLog& log) {
  out << "name,t_start,t_end\n";
  for (const auto& s : log.overhead_spans)
    out << s.name << ',' << fixed6(s.t_start) << ',' << fixed6(s.t_end) << '\n';
}

std::vector<TaskRecord> read_events_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kEventsCsvHeader)
    throw ConfigError("events.csv: unexpected header");
  std::vector<TaskRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cols.push_back(cell);
    if (cols.size() != 8) throw ConfigError("events.csv: expected 8 columns: " + line);
    try {
      TaskRecord r;
      r.task_id = std::stoull(cols[0]);
      r.item_id = std::stoull(cols[1]);
      r.stage = parse_stage(cols[2]);
      r.node_id = std::stoi(cols[3]);
      r.size_mb = std::stod(cols[4]);
      r.t_submit = std::stod(cols[5]);
      r.t_start = std::stod(cols[6]);
      r.t_end = std::stod(cols[7]);
      records.push_back(r);
    } catch (const std::logic_error&) {
      throw ConfigError("events.csv: malformed row: " + line);
    }
  }
  return records;
}

void to_json(nlohmann::json& j, const EventLog& log) {
  j["design"] = to_string(log.design);
  j["clock_kind"] = log.clock_kind == ClockKind::Virtual ? "Virtual" : "Wall";
  auto& recs = j["records"] = nlohmann::json::array();
  for (const auto& r : log.records) {
    recs.push_back({{"task_id", r.task_id},
                    {"item_id", r.item_id},
                    {"stage", to_string(r.stage)},
                    {"node_id", r.node_id},
                    {"size_mb", r.size_mb},
                    {"t_submit", r.t_submit},
                    {"t_start", r.t_start},
                    {"t_end", r.t_end}});
  }
  auto& spans = j["overhead_spans"] = nlohmann::json::array();
  for (const auto& s : log.overhead_spans)
    spans.push_back({{"name", s.name}, {"t_start", s.t_start}, {"t_end", s.t_end}});
}

void from_json(const nlohmann::json& j, EventLog& log) {
  log.design = parse_design(j.at("design").get<std::string>());
  log.clock_kind = j.at("clock_kind").get<std::string>() == "Wall" ? ClockKind::Wall : ClockKind::Virtual;
  log.records.clear();
  for (const auto& r : j.at("records")) {
    log.records.push_back({r.at("task_id").get<TaskId>(), r.at("item_id").get<ItemId>(),
                           parse_stage(r.at("stage").get<std::string>()), r.at("node_id").get<NodeId>(),
                           r.at("size_mb").get<double>(), r.at("t_submit").get<double>(),
                           r.at("t_start").get<double>(), r.at("t_end").get<double>()});
  }
  log.overhead_spans.clear();
  for (const auto& s : j.at("overhead_spans"))
    log.overhead_spans.push_back(
        {s.at("name").get<std::string>(), s.at("t_start").get<double>(), s.at("t_end").get<double>()});
}

ValidationReport validate_log(const EventLog& log, const ExecutionPlan& plan) {
  ValidationReport report;
  auto fail = [&](std::string msg) { report.violations.push_back(std::move(msg)); };

  // (item, stage) -> record index
  std::map<std::pair<ItemId, int>, std::size_t> seen;
  for (std::size_t i = 0; i < log.records.size(); ++i) {
    const auto& r = log.records[i];
    if (!(r.t_submit <= r.t_start && r.t_start < r.t_end))
      fail("task " + std::to_string(r.task_id) + ": timestamps out of order");
    if (r.node_id < 0 || r.node_id >= plan.cluster.n_nodes)
      fail("task " + std::to_string(r.task_id) + ": unknown node " + std::to_string(r.node_id));
    if (!seen.emplace(std::pair{r.item_id, stage_index(r.stage)}, i).second)
      fail("item " + std::to_string(r.item_id) + " stage " + std::string(to_string(r.stage)) +
           " recorded more than once");
  }
  for (const auto& s : log.overhead_spans) {
    if (!is_known_overhead(s.name)) fail("unknown overhead span '" + s.name + "'");
    if (s.t_end < s.t_start) fail("overhead span '" + s.name + "' ends before it starts");
  }

  std::map<ItemId, NodeId> early_bound;
  if (plan.per_node_input) {
    for (std::size_t n = 0; n < plan.per_node_input->size(); ++n)
      for (const auto& item : (*plan.per_node_input)[n]) early_bound[item.id] = static_cast<NodeId>(n);
  }

  for (const auto& item : plan.workload.items) {
    auto t1 = seen.find({item.id, 0});
    auto t2 = seen.find({item.id, 1});
    if (t1 == seen.end() || t2 == seen.end()) {
      fail("item " + std::to_string(item.id) + " incomplete");
      continue;
    }
    const auto& r1 = log.records[t1->second];
    const auto& r2 = log.records[t2->second];
    if (r1.t_end > r2.t_start) fail("item " + std::to_string(item.id) + ": T2 started before T1 ended");
    if (r1.node_id != r2.node_id)
      fail("item " + std::to_string(item.id) + ": T2 on node " + std::to_string(r2.node_id) +
           " but its T1 ran on node " + std::to_string(r1.node_id));
    if (auto it = early_bound.find(item.id); it != early_bound.end() && it->second != r1.node_id)
      fail("item " + std::to_string(item.id) + ": T1 ran off its early-bound node");
  }
  if (seen.size() != 2 * plan.workload.items.size())
    fail("log holds records for items outside the workload");

  // Capacity sweep. At equal timestamps ends are applied before starts.
  struct Edge {
    double t;
    int sign;
    const TaskSpec* task;
  };
  std::vector<std::vector<Edge>> edges(static_cast<std::size_t>(plan.cluster.n_nodes));
  for (const auto& r : log.records) {
    if (r.node_id < 0 || r.node_id >= plan.cluster.n_nodes) continue;
    const TaskSpec* task = &plan.workload.task(r.stage);
    edges[static_cast<std::size_t>(r.node_id)].push_back({r.t_start, +1, task});
    edges[static_cast<std::size_t>(r.node_id)].push_back({r.t_end, -1, task});
  }
  for (std::size_t n = 0; n < edges.size(); ++n) {
    auto& ev = edges[n];
    std::sort(ev.begin(), ev.end(), [](const Edge& a, const Edge& b) {
      return a.t != b.t ? a.t < b.t : a.sign < b.sign;
    });
    long cpus = 0, gpus = 0;
    double mem = 0.0;
    for (const auto& e : ev) {
      cpus += e.sign * e.task->cpu_cores;
      gpus += e.sign * e.task->gpus;
      mem += e.sign * e.task->mem_mb;
      if (cpus > plan.cluster.cpus_per_node || gpus > plan.cluster.gpus_per_node ||
          mem > plan.cluster.mem_per_node_mb + 1e-6) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "node %zu over capacity at t=%.6f (cpus %ld, gpus %ld, mem %.1f)",
                      n, e.t, cpus, gpus, mem);
        fail(buf);
        break;
      }
    }
  }
  return report;
}

}  // namespace wfsim
