#pragma once

#include <cstdint>
#include <set>
#include <vector>

#include <json.hpp>

#include "wfsim/workload.hpp"

namespace wfsim {

using NodeId = int;
using TaskId = std::uint64_t;

struct ClusterSpec {
  int n_nodes = 1;
  int cpus_per_node = 1;
  int gpus_per_node = 0;
  double mem_per_node_mb = 1.0;
  /// Per-node duration multiplier (1.0 = nominal). Empty means all nominal.
  std::vector<double> slowdown;

  int total_cpus() const { return n_nodes * cpus_per_node; }
  int total_gpus() const { return n_nodes * gpus_per_node; }
  double node_slowdown(NodeId node) const;

  void validate() const;

  friend bool operator==(const ClusterSpec&, const ClusterSpec&) = default;
};

struct NodeState {
  NodeId node_id = 0;
  int free_cpus = 0;
  int free_gpus = 0;
  double free_mem_mb = 0.0;
  std::set<TaskId> running;

  static NodeState idle(const ClusterSpec& cluster, NodeId node);

  friend bool operator==(const NodeState&, const NodeState&) = default;
};

std::vector<NodeState> idle_nodes(const ClusterSpec& cluster);

bool can_place(const NodeState& node, const TaskSpec& task);

// Both throw PlacementError when the precondition does not hold.
NodeState allocate(NodeState node, TaskId id, const TaskSpec& task);
NodeState release(NodeState node, TaskId id, const TaskSpec& task);

/// Largest number of `second` tasks that fit next to as many `first` tasks as
/// an idle node holds. Returns {first_count, second_count}.
std::pair<int, int> max_concurrency(const ClusterSpec& cluster, const TaskSpec& first,
                                    const TaskSpec& second);

void to_json(nlohmann::json& j, const ClusterSpec& cluster);
void from_json(const nlohmann::json& j, ClusterSpec& cluster);

}  // namespace wfsim
