#include <algorithm>
#include <functional>
#include <list>
#include <memory>
#include <queue>

#include "wfsim/engine.hpp"
#include "wfsim/errors.hpp"
#include "wfsim/queue.hpp"

namespace wfsim {

void OverheadConfig::validate() const {
  if (dataset_discovery_s < 0 || scheduler_latency_s < 0 || task_bootstrap_s < 0 ||
      task_teardown_s < 0 || queue_setup_s < 0 || (distribute_s && *distribute_s < 0))
    throw ConfigError("overheads must be non-negative");
}

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

class EventQueue {
 public:
  void at(double t, std::function<void()> fn) { heap_.push({t, seq_++, std::move(fn)}); }

  bool step(double& now) {
    if (heap_.empty()) return false;
    // Moving out of top() is fine: the element is popped right after.
    Event ev = std::move(const_cast<Event&>(heap_.top()));
    heap_.pop();
    now = ev.t;
    ev.fn();
    return true;
  }

 private:
  struct Event {
    double t;
    std::uint64_t seq;
    std::function<void()> fn;
    bool operator>(const Event& o) const { return t != o.t ? t > o.t : seq > o.seq; }
  };
  std::priority_queue<Event, std::vector<Event>, std::greater<>> heap_;
  std::uint64_t seq_ = 0;
};

class Simulator {
 public:
  Simulator(const ExecutionPlan& plan, const ModelTable& models, const OverheadConfig& overheads,
            const ProtocolConfig& protocol, std::uint64_t seed)
      : plan_(plan), over_(overheads), proto_(protocol), seed_(seed),
        models_{models.lookup(plan.design, plan.workload.task(Stage::T1).perf_model_id),
                models.lookup(plan.design, plan.workload.task(Stage::T2).perf_model_id)} {
    log_.design = plan.design;
    log_.clock_kind = ClockKind::Virtual;
  }

  EventLog run(SimStats& stats) {
    double t = 0.0;
    span("dataset_discovery", t, t + over_.dataset_discovery_s);
    t += over_.dataset_discovery_s;
    if (plan_.design == Design::D1) {
      start_design1(t);
    } else {
      start_queued(t);
    }
    while (events_.step(now_)) ++stats.events;
    stats.data_pulls = data_pulls_;
    stats.wait_pulls = wait_pulls_;
    stats.empty_pulls = empty_pulls_;
    std::sort(log_.records.begin(), log_.records.end(),
              [](const TaskRecord& a, const TaskRecord& b) { return a.task_id < b.task_id; });
    return std::move(log_);
  }

 private:
  struct Pending {
    TaskId id;
    DataItem item;
    Stage stage;
    double t_submit;
  };

  void span(const char* name, double a, double b) {
    if (b > a) log_.overhead_spans.push_back({name, a, b});
  }

  double duration(const DataItem& item, Stage stage, NodeId node) const {
    return task_duration(models_[stage_index(stage)], item, stage, plan_.cluster, node, seed_);
  }

  // Design 1: every task goes through one dispatcher that spends
  // scheduler_latency_s per placement decision.

  void start_design1(double t0) {
    nodes_ = idle_nodes(plan_.cluster);
    for (const auto& item : plan_.workload.items) pending_.push_back({next_task_++, item, Stage::T1, t0});
    events_.at(t0, [this] { dispatch(); });
  }

  void dispatch() {
    if (dispatcher_busy_) return;
    for (auto it = pending_.begin(); it != pending_.end(); ++it) {
      const TaskSpec& spec = plan_.workload.task(it->stage);
      auto node = tagged_place(it->item.id, it->stage, nodes_, spec, affinity_);
      if (!node) continue;
      Pending task = *it;
      pending_.erase(it);
      auto& state = nodes_[static_cast<std::size_t>(*node)];
      state = allocate(std::move(state), task.id, spec);
      if (task.stage == Stage::T1) affinity_[task.item.id] = *node;
      dispatcher_busy_ = true;
      double ready = now_ + over_.scheduler_latency_s;
      span("scheduler", now_, ready);
      events_.at(ready, [this, task, n = *node] {
        dispatcher_busy_ = false;
        launch_pipeline_task(task, n);
        dispatch();
      });
      return;
    }
  }

  void launch_pipeline_task(const Pending& task, NodeId node) {
    double t_start = now_ + over_.task_bootstrap_s;
    span("bootstrap", now_, t_start);
    double t_end = t_start + duration(task.item, task.stage, node);
    double t_free = t_end + over_.task_teardown_s;
    log_.records.push_back({task.id, task.item.id, task.stage, node, task.item.size_mb, task.t_submit,
                            t_start, t_end});
    span("teardown", t_end, t_free);
    events_.at(t_free, [this, task, node] {
      auto& state = nodes_[static_cast<std::size_t>(node)];
      state = release(std::move(state), task.id, plan_.workload.task(task.stage));
      if (task.stage == Stage::T1) pending_.push_back({next_task_++, task.item, Stage::T2, now_});
      dispatch();
    });
  }

  // Designs 2 and 2.A: long-running workers pulling through the queue
  // protocol.

  void start_queued(double t) {
    if (plan_.design == Design::D2A) {
      double dist = over_.distribute_s.value_or(plan_.partition_wall_s);
      span("distribute", t, t + dist);
      t += dist;
    }
    span("setup", t, t + over_.queue_setup_s);
    t += over_.queue_setup_s;
    t_seed_ = t;

    const int n_nodes = plan_.cluster.n_nodes;
    auto seed_queue = [this](QueueState& q, const std::vector<DataItem>& items) {
      SenderId loader = q.connect();
      for (const auto& item : items)
        if (!q.try_push(loader, item)) throw ConfigError("input queue capacity below dataset size");
      q.disconnect(loader);
    };
    if (plan_.design == Design::D2) {
      inputs_.emplace_back(std::nullopt);
      seed_queue(inputs_[0], plan_.workload.items);
    } else {
      for (int n = 0; n < n_nodes; ++n) {
        inputs_.emplace_back(std::nullopt);
        seed_queue(inputs_.back(), plan_.per_node_input->at(static_cast<std::size_t>(n)));
      }
    }
    for (int n = 0; n < n_nodes; ++n) outputs_.emplace_back(proto_.queue_capacity);

    for (NodeId n = 0; n < n_nodes; ++n) {
      for (int w = 0; w < plan_.workers(n, Stage::T1); ++w) {
        Worker worker{n, Stage::T1, next_receiver_++, outputs_[static_cast<std::size_t>(n)].connect()};
        workers_.push_back(worker);
      }
      for (int w = 0; w < plan_.workers(n, Stage::T2); ++w)
        workers_.push_back({n, Stage::T2, next_receiver_++, 0});
    }
    for (std::size_t w = 0; w < workers_.size(); ++w) {
      double first_pull = t + over_.task_bootstrap_s;
      span("bootstrap", t, first_pull);
      events_.at(first_pull, [this, w] { pull(w); });
    }
  }

  struct Worker {
    NodeId node;
    Stage stage;
    ReceiverId receiver;
    SenderId sender;  // T1 only: handle on the node's Queue 2
  };

  QueueState& source_for(const Worker& w) {
    if (w.stage == Stage::T2) return outputs_[static_cast<std::size_t>(w.node)];
    return plan_.design == Design::D2 ? inputs_[0] : inputs_[static_cast<std::size_t>(w.node)];
  }

  void pull(std::size_t w) {
    Worker& worker = workers_[w];
    PullResult r = source_for(worker).pull(worker.receiver);
    if (r.is_wait()) {
      ++wait_pulls_;
      events_.at(now_ + proto_.wait_interval_s, [this, w] { pull(w); });
      return;
    }
    if (r.is_empty()) {
      ++empty_pulls_;
      if (worker.stage == Stage::T1) outputs_[static_cast<std::size_t>(worker.node)].disconnect(worker.sender);
      span("teardown", now_, now_ + over_.task_teardown_s);
      return;
    }
    ++data_pulls_;
    const DataItem item = *r.item;
    double t_submit = worker.stage == Stage::T1 ? t_seed_ : queued_at_.at(item.id);
    double t_end = now_ + duration(item, worker.stage, worker.node);
    log_.records.push_back({next_task_++, item.id, worker.stage, worker.node, item.size_mb, t_submit,
                            now_, t_end});
    events_.at(t_end, [this, w, item] {
      if (workers_[w].stage == Stage::T1) {
        forward(w, item);
      } else {
        pull(w);
      }
    });
  }

  void forward(std::size_t w, const DataItem& item) {
    Worker& worker = workers_[w];
    auto& out = outputs_[static_cast<std::size_t>(worker.node)];
    if (!out.try_push(worker.sender, item)) {
      events_.at(now_ + proto_.wait_interval_s, [this, w, item] { forward(w, item); });
      return;
    }
    queued_at_[item.id] = now_;
    pull(w);
  }

  const ExecutionPlan& plan_;
  OverheadConfig over_;
  ProtocolConfig proto_;
  std::uint64_t seed_;
  std::array<PerfModel, 2> models_;

  EventQueue events_;
  double now_ = 0.0;
  EventLog log_;
  TaskId next_task_ = 0;

  std::vector<NodeState> nodes_;
  std::list<Pending> pending_;
  std::map<ItemId, NodeId> affinity_;
  bool dispatcher_busy_ = false;

  std::vector<QueueState> inputs_;
  std::vector<QueueState> outputs_;
  std::vector<Worker> workers_;
  std::map<ItemId, double> queued_at_;
  ReceiverId next_receiver_ = 1;
  double t_seed_ = 0.0;
  std::uint64_t data_pulls_ = 0, wait_pulls_ = 0, empty_pulls_ = 0;
};

}  // namespace

double task_duration(const PerfModel& model, const DataItem& item, Stage stage,
                     const ClusterSpec& cluster, NodeId node, std::uint64_t seed) {
  Rng rng(splitmix(splitmix(seed) ^ splitmix(item.id * 2 + static_cast<std::uint64_t>(stage_index(stage)))));
  return sample_duration(model, item.size_mb, rng) * cluster.node_slowdown(node);
}

EventLog simulate(const ExecutionPlan& plan, const ModelTable& models,
                  const OverheadConfig& overheads, const ProtocolConfig& protocol,
                  std::uint64_t seed, SimStats* stats) {
  overheads.validate();
  if (!(protocol.wait_interval_s > 0.0)) throw ConfigError("wait_interval_s must be positive");
  check_feasible(plan);
  if (plan.design == Design::D2A && !plan.per_node_input)
    throw PlanningError("Design 2.A plan without an input partition");
  SimStats local;
  Simulator sim(plan, models, overheads, protocol, seed);
  EventLog log = sim.run(local);
  if (stats) *stats = local;
  return log;
}

}  // namespace wfsim
