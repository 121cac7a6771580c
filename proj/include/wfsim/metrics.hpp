#pragma once

#include <array>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "wfsim/cluster.hpp"
#include "wfsim/event_log.hpp"

namespace wfsim {

/// Busy count holds from `t` until the next point.
struct StepPoint {
  double t = 0.0;
  double busy = 0.0;
};

enum class Resource { Cpu, Gpu };

/// Step function of busy units of `resource` over [origin, horizon]. The last
/// point is at the horizon with busy 0.
std::vector<StepPoint> busy_timeline(const EventLog& log, const std::array<TaskSpec, 2>& pipeline,
                                     Resource resource);

/// Integral of busy units over [t0, t1].
double busy_integral(const std::vector<StepPoint>& timeline, double t0, double t1);

struct UtilizationReport {
  std::vector<StepPoint> cpu_timeline;
  std::vector<StepPoint> gpu_timeline;
  double avg_cpu_util_pct = 0.0;
  double avg_gpu_util_pct = 0.0;
};

/// Averages use the whole makespan, overhead prologue included.
UtilizationReport utilization(const EventLog& log, const ClusterSpec& cluster,
                              const std::array<TaskSpec, 2>& pipeline);

/// Cluster-wide utilization percentage of one resource class over [t0, t1].
double window_utilization(const EventLog& log, const ClusterSpec& cluster,
                          const std::array<TaskSpec, 2>& pipeline, Resource resource, double t0,
                          double t1);

/// MB/s over items whose T1 and T2 both completed; 0 for an empty log.
double throughput(const EventLog& log);

/// Total seconds per overhead name. Throws ConfigError on unknown names.
std::map<std::string, double> overhead_report(const EventLog& log);

struct NodeTotals {
  double t1_busy_s = 0.0;
  double t2_busy_s = 0.0;
  int items_processed = 0;
};

std::vector<NodeTotals> per_node_totals(const EventLog& log, int n_nodes);

/// Coefficient of variation (population std / mean) of per-node busy time.
double imbalance(const EventLog& log, int n_nodes);

struct MetricsReport {
  Design design = Design::D1;
  double makespan_s = 0.0;
  UtilizationReport util;
  double throughput_mb_s = 0.0;
  std::map<std::string, double> overheads;
  std::vector<NodeTotals> per_node;
  double imbalance_cv = 0.0;
};

MetricsReport compute_metrics(const EventLog& log, const ClusterSpec& cluster,
                              const std::array<TaskSpec, 2>& pipeline);

/// Scalar summary (timelines omitted; see write_timeline_csv).
void to_json(nlohmann::json& j, const MetricsReport& report);
void from_json(const nlohmann::json& j, MetricsReport& report);

/// Columns: t,busy,util_pct.
void write_timeline_csv(std::ostream& out, const std::vector<StepPoint>& timeline, int capacity);

}  // namespace wfsim
