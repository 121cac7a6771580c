#include "wfsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <set>

#include "wfsim/errors.hpp"

namespace wfsim {

namespace {

int demand(const TaskSpec& task, Resource r) { return r == Resource::Cpu ? task.cpu_cores : task.gpus; }

}  // namespace

std::vector<StepPoint> busy_timeline(const EventLog& log, const std::array<TaskSpec, 2>& pipeline,
                                     Resource resource) {
  std::vector<std::pair<double, int>> edges;
  edges.reserve(2 * log.records.size());
  for (const auto& r : log.records) {
    int d = demand(pipeline[stage_index(r.stage)], resource);
    if (d == 0) continue;
    edges.emplace_back(r.t_start, d);
    edges.emplace_back(r.t_end, -d);
  }
  std::sort(edges.begin(), edges.end());

  std::vector<StepPoint> steps;
  const double origin = log.origin();
  const double horizon = log.horizon();
  steps.push_back({origin, 0.0});
  double busy = 0.0;
  for (std::size_t i = 0; i < edges.size();) {
    double t = edges[i].first;
    while (i < edges.size() && edges[i].first == t) busy += edges[i++].second;
    if (steps.back().t == t) {
      steps.back().busy = busy;
    } else {
      steps.push_back({t, busy});
    }
  }
  if (steps.back().t < horizon) steps.push_back({horizon, 0.0});
  steps.back().busy = 0.0;
  return steps;
}

double busy_integral(const std::vector<StepPoint>& timeline, double t0, double t1) {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < timeline.size(); ++i) {
    double a = std::max(timeline[i].t, t0);
    double b = std::min(timeline[i + 1].t, t1);
    if (b > a) total += timeline[i].busy * (b - a);
  }
  return total;
}

UtilizationReport utilization(const EventLog& log, const ClusterSpec& cluster,
                              const std::array<TaskSpec, 2>& pipeline) {
  UtilizationReport report;
  report.cpu_timeline = busy_timeline(log, pipeline, Resource::Cpu);
  report.gpu_timeline = busy_timeline(log, pipeline, Resource::Gpu);
  const double span = log.makespan();
  if (span > 0.0) {
    const double a = log.origin(), b = log.horizon();
    if (cluster.total_cpus() > 0)
      report.avg_cpu_util_pct = busy_integral(report.cpu_timeline, a, b) / (cluster.total_cpus() * span) * 100.0;
    if (cluster.total_gpus() > 0)
      report.avg_gpu_util_pct = busy_integral(report.gpu_timeline, a, b) / (cluster.total_gpus() * span) * 100.0;
  }
  return report;
}

double window_utilization(const EventLog& log, const ClusterSpec& cluster,
                          const std::array<TaskSpec, 2>& pipeline, Resource resource, double t0,
                          double t1) {
  int capacity = resource == Resource::Cpu ? cluster.total_cpus() : cluster.total_gpus();
  if (!(t1 > t0) || capacity == 0) return 0.0;
  return busy_integral(busy_timeline(log, pipeline, resource), t0, t1) / (capacity * (t1 - t0)) * 100.0;
}

double throughput(const EventLog& log) {
  const double span = log.makespan();
  if (!(span > 0.0)) return 0.0;
  std::map<ItemId, std::pair<int, double>> stages;
  for (const auto& r : log.records) {
    auto& entry = stages[r.item_id];
    entry.first |= 1 << stage_index(r.stage);
    entry.second = r.size_mb;
  }
  double mb = 0.0;
  for (const auto& [id, entry] : stages)
    if (entry.first == 3) mb += entry.second;
  return mb / span;
}

std::map<std::string, double> overhead_report(const EventLog& log) {
  std::map<std::string, double> totals;
  for (const auto& s : log.overhead_spans) {
    if (!is_known_overhead(s.name)) throw ConfigError("unknown overhead span '" + s.name + "'");
    totals[s.name] += s.t_end - s.t_start;
  }
  return totals;
}

std::vector<NodeTotals> per_node_totals(const EventLog& log, int n_nodes) {
  std::vector<NodeTotals> totals(static_cast<std::size_t>(std::max(n_nodes, 0)));
  for (const auto& r : log.records) {
    if (r.node_id < 0) continue;
    if (static_cast<std::size_t>(r.node_id) >= totals.size()) totals.resize(static_cast<std::size_t>(r.node_id) + 1);
    auto& t = totals[static_cast<std::size_t>(r.node_id)];
    if (r.stage == Stage::T1) {
      t.t1_busy_s += r.duration();
    } else {
      t.t2_busy_s += r.duration();
      ++t.items_processed;
    }
  }
  return totals;
}

double imbalance(const EventLog& log, int n_nodes) {
  auto totals = per_node_totals(log, n_nodes);
  if (totals.empty()) return 0.0;
  double mean = 0.0;
  for (const auto& t : totals) mean += t.t1_busy_s + t.t2_busy_s;
  mean /= static_cast<double>(totals.size());
  if (mean == 0.0) return 0.0;
  double var = 0.0;
  for (const auto& t : totals) {
    double d = t.t1_busy_s + t.t2_busy_s - mean;
    var += d * d;
  }
  var /= static_cast<double>(totals.size());
  return std::sqrt(var) / mean;
}

MetricsReport compute_metrics(const EventLog& log, const ClusterSpec& cluster,
                              const std::array<TaskSpec, 2>& pipeline) {
  MetricsReport m;
  m.design = log.design;
  m.makespan_s = log.makespan();
  m.util = utilization(log, cluster, pipeline);
  m.throughput_mb_s = throughput(log);
  m.overheads = overhead_report(log);
  m.per_node = per_node_totals(log, cluster.n_nodes);
  m.imbalance_cv = imbalance(log, cluster.n_nodes);
  return m;
}

void to_json(nlohmann::json& j, const MetricsReport& m) {
  j = {{"design", to_string(m.design)},
       {"makespan_s", m.makespan_s},
       {"avg_cpu_util_pct", m.util.avg_cpu_util_pct},
       {"avg_gpu_util_pct", m.util.avg_gpu_util_pct},
       {"throughput_mb_s", m.throughput_mb_s},
       {"overheads", m.overheads},
       {"imbalance_cv", m.imbalance_cv}};
  auto& nodes = j["per_node_totals"] = nlohmann::json::array();
  for (std::size_t n = 0; n < m.per_node.size(); ++n) {
    nodes.push_back({{"node", n},
                     {"t1_busy_s", m.per_node[n].t1_busy_s},
                     {"t2_busy_s", m.per_node[n].t2_busy_s},
                     {"items_processed", m.per_node[n].items_processed}});
  }
}

void from_json(const nlohmann::json& j, MetricsReport& m) {
  m.design = parse_design(j.at("design").get<std::string>());
  m.makespan_s = j.at("makespan_s").get<double>();
  m.util.avg_cpu_util_pct = j.at("avg_cpu_util_pct").get<double>();
  m.util.avg_gpu_util_pct = j.at("avg_gpu_util_pct").get<double>();
  m.throughput_mb_s = j.at("throughput_mb_s").get<double>();
  m.overheads = j.at("overheads").get<std::map<std::string, double>>();
  m.imbalance_cv = j.at("imbalance_cv").get<double>();
  m.per_node.clear();
  for (const auto& n : j.at("per_node_totals"))
    m.per_node.push_back({n.at("t1_busy_s").get<double>(), n.at("t2_busy_s").get<double>(),
                          n.at("items_processed").get<int>()});
}

void write_timeline_csv(std::ostream& out, const std::vector<StepPoint>& timeline, int capacity) {
  out << "t,busy,util_pct\n";
  char buf[128];
  for (const auto& p : timeline) {
    double pct = capacity > 0 ? p.busy / capacity * 100.0 : 0.0;
    std::snprintf(buf, sizeof buf, "%.6f,%g,%.6f\n", p.t, p.busy, pct);
    out << buf;
  }
}

}  // namespace wfsim
