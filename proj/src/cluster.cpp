#include "wfsim/cluster.hpp"

#include <string>

#include "wfsim/errors.hpp"

namespace wfsim {

double ClusterSpec::node_slowdown(NodeId node) const {
  if (slowdown.empty()) return 1.0;
  return slowdown.at(static_cast<std::size_t>(node));
}

void ClusterSpec::validate() const {
  if (n_nodes < 1 || cpus_per_node < 1 || gpus_per_node < 0 || !(mem_per_node_mb > 0.0))
    throw ConfigError("cluster needs n_nodes >= 1, cpus_per_node >= 1, gpus_per_node >= 0, mem > 0");
  if (gpus_per_node > cpus_per_node) throw ConfigError("cluster must satisfy g <= c");
  if (!slowdown.empty()) {
    if (slowdown.size() != static_cast<std::size_t>(n_nodes))
      throw ConfigError("slowdown list must have one entry per node");
    for (double s : slowdown)
      if (!(s > 0.0)) throw ConfigError("slowdown factors must be positive");
  }
}

NodeState NodeState::idle(const ClusterSpec& cluster, NodeId node) {
  return NodeState{node, cluster.cpus_per_node, cluster.gpus_per_node, cluster.mem_per_node_mb, {}};
}

std::vector<NodeState> idle_nodes(const ClusterSpec& cluster) {
  std::vector<NodeState> nodes;
  nodes.reserve(static_cast<std::size_t>(cluster.n_nodes));
  for (NodeId n = 0; n < cluster.n_nodes; ++n) nodes.push_back(NodeState::idle(cluster, n));
  return nodes;
}

bool can_place(const NodeState& node, const TaskSpec& task) {
  return task.cpu_cores <= node.free_cpus && task.gpus <= node.free_gpus &&
         task.mem_mb <= node.free_mem_mb;
}

NodeState allocate(NodeState node, TaskId id, const TaskSpec& task) {
  if (!can_place(node, task))
    throw PlacementError("task " + std::to_string(id) + " does not fit on node " +
                         std::to_string(node.node_id));
  if (!node.running.insert(id).second)
    throw PlacementError("task " + std::to_string(id) + " already running on node " +
                         std::to_string(node.node_id));
  node.free_cpus -= task.cpu_cores;
  node.free_gpus -= task.gpus;
  node.free_mem_mb -= task.mem_mb;
  return node;
}

NodeState release(NodeState node, TaskId id, const TaskSpec& task) {
  if (node.running.erase(id) == 0)
    throw PlacementError("task " + std::to_string(id) + " not running on node " +
                         std::to_string(node.node_id));
  node.free_cpus += task.cpu_cores;
  node.free_gpus += task.gpus;
  node.free_mem_mb += task.mem_mb;
  return node;
}

std::pair<int, int> max_concurrency(const ClusterSpec& cluster, const TaskSpec& first,
                                    const TaskSpec& second) {
  NodeState node = NodeState::idle(cluster, 0);
  TaskId id = 0;
  int n_first = 0;
  // Zero-demand tasks would fit forever; cap at the core count.
  while (can_place(node, first) && n_first < cluster.cpus_per_node + cluster.gpus_per_node) {
    node = allocate(std::move(node), id++, first);
    ++n_first;
  }
  int n_second = 0;
  while (can_place(node, second) && n_second < cluster.cpus_per_node + cluster.gpus_per_node) {
    node = allocate(std::move(node), id++, second);
    ++n_second;
  }
  return {n_first, n_second};
}

void to_json(nlohmann::json& j, const ClusterSpec& c) {
  j = {{"n_nodes", c.n_nodes},
       {"cpus_per_node", c.cpus_per_node},
       {"gpus_per_node", c.gpus_per_node},
       {"mem_per_node_mb", c.mem_per_node_mb}};
  if (!c.slowdown.empty()) j["slowdown"] = c.slowdown;
}

void from_json(const nlohmann::json& j, ClusterSpec& c) {
  c.n_nodes = j.at("n_nodes").get<int>();
  c.cpus_per_node = j.at("cpus_per_node").get<int>();
  c.gpus_per_node = j.value("gpus_per_node", 0);
  c.mem_per_node_mb = j.at("mem_per_node_mb").get<double>();
  c.slowdown = j.value("slowdown", std::vector<double>{});
  c.validate();
}

}  // namespace wfsim
