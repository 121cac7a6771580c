#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "wfsim/cluster.hpp"
#include "wfsim/workload.hpp"

namespace wfsim {

struct ExecutionPlan;

enum class ClockKind { Virtual, Wall };

struct TaskRecord {
  TaskId task_id = 0;
  ItemId item_id = 0;
  Stage stage = Stage::T1;
  NodeId node_id = 0;
  double size_mb = 0.0;
  double t_submit = 0.0;
  double t_start = 0.0;
  double t_end = 0.0;

  double duration() const { return t_end - t_start; }
  friend bool operator==(const TaskRecord&, const TaskRecord&) = default;
};

/// Names are restricted to dataset_discovery, scheduler, setup, distribute,
/// bootstrap and teardown.
struct OverheadSpan {
  std::string name;
  double t_start = 0.0;
  double t_end = 0.0;

  friend bool operator==(const OverheadSpan&, const OverheadSpan&) = default;
};

bool is_known_overhead(const std::string& name);

struct EventLog {
  Design design = Design::D1;
  ClockKind clock_kind = ClockKind::Virtual;
  std::vector<TaskRecord> records;
  std::vector<OverheadSpan> overhead_spans;

  /// Earliest t_submit / span start.
  double origin() const;
  /// Latest t_end over records and spans.
  double horizon() const;
  double makespan() const { return horizon() - origin(); }

  friend bool operator==(const EventLog&, const EventLog&) = default;
};

// events.csv columns, in order:
//   task_id,item_id,stage,node_id,size_mb,t_submit,t_start,t_end
// Times are seconds with six decimals.
inline constexpr const char* kEventsCsvHeader =
    "task_id,item_id,stage,node_id,size_mb,t_submit,t_start,t_end";

void write_events_csv(std::ostream& out, const EventLog& log);
/// Overhead spans as name,t_start,t_end.
void write_overheads_csv(std::ostream& out, const EventLog& log);
std::vector<TaskRecord> read_events_csv(std::istream& in);

void to_json(nlohmann::json& j, const EventLog& log);
void from_json(const nlohmann::json& j, EventLog& log);

struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

/// Completeness, stage ordering, per-node capacity (sweep over the records)
/// and data affinity.
ValidationReport validate_log(const EventLog& log, const ExecutionPlan& plan);

}  // namespace wfsim
