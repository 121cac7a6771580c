#include "wfsim/designs.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <string>

#include "wfsim/errors.hpp"

namespace wfsim {

namespace {

std::array<int, 2> derive_workers(const WorkloadSpec& workload, const ClusterSpec& cluster,
                                  const WorkerOverride& over) {
  const TaskSpec& t1 = workload.task(Stage::T1);
  const TaskSpec& t2 = workload.task(Stage::T2);
  std::array<int, 2> counts{};
  if (over.t1 && over.t2) {
    counts = {*over.t1, *over.t2};
  } else if (over.t1) {
    NodeState node = NodeState::idle(cluster, 0);
    TaskId id = 0;
    for (int i = 0; i < *over.t1 && can_place(node, t1); ++i) node = allocate(node, id++, t1);
    int n2 = 0;
    while (can_place(node, t2) && n2 < cluster.cpus_per_node + cluster.gpus_per_node) {
      node = allocate(node, id++, t2);
      ++n2;
    }
    counts = {*over.t1, n2};
  } else {
    auto [n1, n2] = max_concurrency(cluster, t1, t2);
    counts = {n1, over.t2 ? *over.t2 : n2};
  }
  return counts;
}

ExecutionPlan base_plan(Design design, const WorkloadSpec& workload, const ClusterSpec& cluster,
                        const WorkerOverride& over) {
  workload.validate();
  cluster.validate();
  ExecutionPlan plan;
  plan.design = design;
  plan.workload = workload;
  plan.cluster = cluster;
  plan.worker_counts.assign(static_cast<std::size_t>(cluster.n_nodes),
                            derive_workers(workload, cluster, over));
  check_feasible(plan);
  return plan;
}

}  // namespace

void check_feasible(const ExecutionPlan& plan) {
  const TaskSpec& t1 = plan.workload.task(Stage::T1);
  const TaskSpec& t2 = plan.workload.task(Stage::T2);
  for (NodeId n = 0; n < plan.cluster.n_nodes; ++n) {
    auto [w1, w2] = plan.worker_counts.at(static_cast<std::size_t>(n));
    if (w1 < 1 || w2 < 1)
      throw PlanningError("infeasible plan: node " + std::to_string(n) + " has " +
                          std::to_string(w1) + " T1 and " + std::to_string(w2) +
                          " T2 slots; both stages need at least one");
    NodeState node = NodeState::idle(plan.cluster, n);
    TaskId id = 0;
    for (int i = 0; i < w1 + w2; ++i) {
      const TaskSpec& task = i < w1 ? t1 : t2;
      if (!can_place(node, task))
        throw PlanningError("infeasible plan: " + std::to_string(w1) + " T1 + " +
                            std::to_string(w2) + " T2 exceed the resources of node " +
                            std::to_string(n));
      node = allocate(node, id++, task);
    }
  }
}

ExecutionPlan plan_design1(const WorkloadSpec& workload, const ClusterSpec& cluster,
                           const WorkerOverride& workers) {
  return base_plan(Design::D1, workload, cluster, workers);
}

ExecutionPlan plan_design2(const WorkloadSpec& workload, const ClusterSpec& cluster,
                           const WorkerOverride& workers) {
  ExecutionPlan plan = base_plan(Design::D2, workload, cluster, workers);
  plan.queues = {true, 0, cluster.n_nodes};
  return plan;
}

ExecutionPlan plan_design2a(const WorkloadSpec& workload, const ClusterSpec& cluster,
                            const PerfModel& model, const WorkerOverride& workers) {
  ExecutionPlan plan = base_plan(Design::D2A, workload, cluster, workers);
  plan.queues = {false, cluster.n_nodes, cluster.n_nodes};
  auto t0 = std::chrono::steady_clock::now();
  plan.per_node_input = partition_early_binding(workload.items, cluster.n_nodes, model);
  plan.partition_wall_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return plan;
}

ExecutionPlan make_plan(Design design, const WorkloadSpec& workload, const ClusterSpec& cluster,
                        const ModelTable& models, const WorkerOverride& workers) {
  switch (design) {
    case Design::D1: return plan_design1(workload, cluster, workers);
    case Design::D2: return plan_design2(workload, cluster, workers);
    case Design::D2A:
      return plan_design2a(workload, cluster,
                           models.lookup(Design::D2A, workload.task(Stage::T1).perf_model_id),
                           workers);
  }
  throw ConfigError("unknown design");
}

std::vector<std::vector<DataItem>> partition_early_binding(std::span<const DataItem> items,
                                                           int n_nodes, const PerfModel& model) {
  if (n_nodes < 1) throw ConfigError("partition needs at least one node");
  std::vector<std::pair<double, std::size_t>> order;
  order.reserve(items.size());
  for (std::size_t i = 0; i < items.size(); ++i)
    order.emplace_back(predict_duration(model, items[i].size_mb), i);
  std::sort(order.begin(), order.end(), [&](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return items[a.second].id < items[b.second].id;
  });

  std::vector<std::vector<DataItem>> parts(static_cast<std::size_t>(n_nodes));
  std::vector<double> load(static_cast<std::size_t>(n_nodes), 0.0);
  for (const auto& [cost, idx] : order) {
    auto target = static_cast<std::size_t>(std::min_element(load.begin(), load.end()) - load.begin());
    parts[target].push_back(items[idx]);
    load[target] += cost;
  }
  return parts;
}

std::optional<NodeId> tagged_place(ItemId item, Stage stage, std::span<const NodeState> nodes,
                                   const TaskSpec& task, const std::map<ItemId, NodeId>& affinity) {
  if (stage == Stage::T1) {
    for (const auto& node : nodes)
      if (can_place(node, task)) return node.node_id;
    return std::nullopt;
  }
  auto it = affinity.find(item);
  if (it == affinity.end())
    throw PlanningError("T2 requested for item " + std::to_string(item) + " without a T1 placement");
  const NodeState& node = nodes[static_cast<std::size_t>(it->second)];
  if (can_place(node, task)) return node.node_id;
  return std::nullopt;
}

}  // namespace wfsim
