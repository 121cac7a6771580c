#pragma once

#include <array>
#include <map>
#include <optional>
#include <vector>

#include "wfsim/cluster.hpp"
#include "wfsim/perf_model.hpp"
#include "wfsim/workload.hpp"

namespace wfsim {

struct QueueTopology {
  bool global_input = false;  // Queue 1 shared by every node (Design 2)
  int node_input_queues = 0;  // early-bound per-node input queues (Design 2.A)
  int node_output_queues = 0; // per-node Queue 2 between T1 and T2
};

/// Explicit worker counts per node; unset stages are derived from resource
/// feasibility on an idle node.
struct WorkerOverride {
  std::optional<int> t1;
  std::optional<int> t2;
};

struct ExecutionPlan {
  Design design = Design::D1;
  WorkloadSpec workload;
  ClusterSpec cluster;
  /// Slots per node for (T1, T2). For Design 1 these are the peak concurrent
  /// tasks; for Designs 2/2.A the long-running workers.
  std::vector<std::array<int, 2>> worker_counts;
  /// Design 2.A only: early-bound input per node.
  std::optional<std::vector<std::vector<DataItem>>> per_node_input;
  /// Design 1: item -> node of its T1, filled while executing.
  std::map<ItemId, NodeId> affinity_tags;
  QueueTopology queues;
  /// Wall time spent computing the early-binding partition.
  double partition_wall_s = 0.0;

  int workers(NodeId node, Stage stage) const {
    return worker_counts.at(static_cast<std::size_t>(node))[stage_index(stage)];
  }
};

ExecutionPlan plan_design1(const WorkloadSpec& workload, const ClusterSpec& cluster,
                           const WorkerOverride& workers = {});
ExecutionPlan plan_design2(const WorkloadSpec& workload, const ClusterSpec& cluster,
                           const WorkerOverride& workers = {});
/// `model` predicts T1 durations for the balance computation.
ExecutionPlan plan_design2a(const WorkloadSpec& workload, const ClusterSpec& cluster,
                            const PerfModel& model, const WorkerOverride& workers = {});

ExecutionPlan make_plan(Design design, const WorkloadSpec& workload, const ClusterSpec& cluster,
                        const ModelTable& models, const WorkerOverride& workers = {});

/// Longest-processing-time-first: items sorted by predicted duration
/// (descending, ties by id), each placed on the node with the smallest running
/// total (ties to the lowest node id).
std::vector<std::vector<DataItem>> partition_early_binding(std::span<const DataItem> items,
                                                           int n_nodes, const PerfModel& model);

/// Design 1 placement. T1: lowest-id node that fits. T2: exactly the node
/// recorded in `affinity`, or nullopt while that node is busy. Throws
/// PlanningError for a T2 whose item has no affinity tag.
std::optional<NodeId> tagged_place(ItemId item, Stage stage, std::span<const NodeState> nodes,
                                   const TaskSpec& task, const std::map<ItemId, NodeId>& affinity);

/// Throws PlanningError("infeasible plan: ...") if the plan's worker counts
/// cannot run together on a node.
void check_feasible(const ExecutionPlan& plan);

}  // namespace wfsim
