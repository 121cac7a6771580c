#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <cstring>
#include <chrono>
#include <condition_variable>
#include <cstdio>
#include <fstream>
#include <list>
#include <memory>
#include <mutex>
#include <thread>

#include "wfsim/engine.hpp"
#include "wfsim/errors.hpp"
#include "wfsim/queue.hpp"

extern char** environ;

namespace wfsim {

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct SpawnTiming {
  Clock::time_point begin;
  Clock::time_point spawned;
  Clock::time_point reaped;
};

/// Runs the mock task to completion. Returns an error message, empty on
/// success.
std::string run_mock(const fs::path& exe, double sleep_s, const fs::path& in, const fs::path& out,
                     SpawnTiming& timing) {
  char sleep_buf[64];
  std::snprintf(sleep_buf, sizeof sleep_buf, "%.6f", sleep_s);
  std::vector<std::string> args = {exe.string(), "--sleep-s", sleep_buf, "--out", out.string()};
  if (!in.empty()) {
    args.push_back("--in");
    args.push_back(in.string());
  }
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  argv.push_back(nullptr);

  timing.begin = Clock::now();
  pid_t pid = 0;
  int rc = posix_spawn(&pid, exe.c_str(), nullptr, nullptr, argv.data(), environ);
  timing.spawned = Clock::now();
  if (rc != 0) {
    timing.reaped = timing.spawned;
    return "spawn of " + exe.string() + " failed: " + std::strerror(rc);
  }
  int status = 0;
  while (waitpid(pid, &status, 0) < 0 && errno == EINTR) {
  }
  timing.reaped = Clock::now();
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0)
    return "task " + out.filename().string() + " exited with status " + std::to_string(WEXITSTATUS(status));
  return {};
}

class LocalRun {
 public:
  LocalRun(const ExecutionPlan& plan, const ModelTable& models, const OverheadConfig& overheads,
           const ProtocolConfig& protocol, std::uint64_t seed, fs::path workdir, const LocalOptions& options)
      : plan_(plan), over_(overheads), proto_(protocol), seed_(seed), workdir_(std::move(workdir)),
        opts_(options),
        models_{models.lookup(plan.design, plan.workload.task(Stage::T1).perf_model_id),
                models.lookup(plan.design, plan.workload.task(Stage::T2).perf_model_id)} {
    log_.design = plan.design;
    log_.clock_kind = ClockKind::Wall;
  }

  EventLog run() {
    t0_ = Clock::now();
    auto a = Clock::now();
    for (NodeId n = 0; n < plan_.cluster.n_nodes; ++n) fs::create_directories(node_dir(n));
    sleep(over_.dataset_discovery_s);
    add_span("dataset_discovery", a, Clock::now());

    if (plan_.design == Design::D1) {
      run_design1();
    } else {
      run_queued();
    }

    std::sort(log_.records.begin(), log_.records.end(),
              [](const TaskRecord& x, const TaskRecord& y) { return x.task_id < y.task_id; });
    if (!error_.empty()) throw ExecutionError(error_, std::move(log_));
    return std::move(log_);
  }

 private:
  fs::path node_dir(NodeId n) const { return workdir_ / ("node-" + std::to_string(n)); }
  fs::path token(NodeId n, ItemId id, Stage s) const {
    return node_dir(n) / ("item-" + std::to_string(id) + (s == Stage::T1 ? ".t1" : ".t2"));
  }

  double since(Clock::time_point t) const { return std::chrono::duration<double>(t - t0_).count(); }
  static void sleep(double s) {
    if (s > 0.0) std::this_thread::sleep_for(std::chrono::duration<double>(s));
  }

  void add_span(const char* name, Clock::time_point a, Clock::time_point b) {
    std::lock_guard lock(log_mutex_);
    log_.overhead_spans.push_back({name, since(a), since(b)});
  }

  void fail(std::string message) {
    std::lock_guard lock(log_mutex_);
    if (error_.empty()) error_ = std::move(message);
    abort_ = true;
  }

  /// Spawns one program-task and logs it. Returns false on failure.
  bool run_task(const DataItem& item, Stage stage, NodeId node, Clock::time_point submitted) {
    double sleep_s = task_duration(models_[stage_index(stage)], item, stage, plan_.cluster, node, seed_) *
                     opts_.time_scale;
    fs::path in = stage == Stage::T2 ? token(node, item.id, Stage::T1) : fs::path();
    fs::path out = token(node, item.id, stage);
    SpawnTiming timing;
    std::string err = run_mock(opts_.mock_task, sleep_s, in, out, timing);
    bool produced = err.empty() && fs::exists(out);
    auto done = Clock::now();
    if (!err.empty() || !produced) {
      fail(err.empty() ? "missing output " + out.string() : err);
      return false;
    }
    std::lock_guard lock(log_mutex_);
    log_.records.push_back({next_task_++, item.id, stage, node, item.size_mb, since(submitted),
                            since(timing.spawned), since(timing.reaped)});
    log_.overhead_spans.push_back({"bootstrap", since(timing.begin), since(timing.spawned)});
    log_.overhead_spans.push_back({"teardown", since(timing.reaped), since(done)});
    return true;
  }

  // Design 1: the controller thread is the dispatcher; each placed task runs
  // on its own thread.

  struct Pending {
    DataItem item;
    Stage stage;
    Clock::time_point submitted;
  };

  void run_design1() {
    std::vector<NodeState> nodes = idle_nodes(plan_.cluster);
    std::list<Pending> pending;
    std::map<ItemId, NodeId> affinity;
    std::mutex m;
    std::condition_variable cv;
    int running = 0;
    TaskId slot_id = 0;
    std::vector<std::thread> threads;

    auto submitted = Clock::now();
    for (const auto& item : plan_.workload.items) pending.push_back({item, Stage::T1, submitted});

    std::unique_lock lock(m);
    while (true) {
      if (abort_ && running == 0) break;
      if (pending.empty() && running == 0) break;
      std::optional<NodeId> node;
      auto it = pending.begin();
      if (!abort_) {
        for (; it != pending.end(); ++it) {
          node = tagged_place(it->item.id, it->stage, nodes, plan_.workload.task(it->stage), affinity);
          if (node) break;
        }
      }
      if (!node) {
        cv.wait(lock);
        continue;
      }
      Pending task = *it;
      pending.erase(it);
      TaskId sid = slot_id++;
      const TaskSpec& spec = plan_.workload.task(task.stage);
      auto& state = nodes[static_cast<std::size_t>(*node)];
      state = allocate(std::move(state), sid, spec);
      if (task.stage == Stage::T1) affinity[task.item.id] = *node;
      ++running;
      lock.unlock();
      auto a = Clock::now();
      if (over_.scheduler_latency_s > 0.0) {
        sleep(over_.scheduler_latency_s);
        add_span("scheduler", a, Clock::now());
      }
      threads.emplace_back([&, task, sid, n = *node, spec_ptr = &spec] {
        bool ok = run_task(task.item, task.stage, n, task.submitted);
        std::lock_guard guard(m);
        auto& st = nodes[static_cast<std::size_t>(n)];
        st = release(std::move(st), sid, *spec_ptr);
        if (ok && task.stage == Stage::T1) pending.push_back({task.item, Stage::T2, Clock::now()});
        --running;
        cv.notify_all();
      });
      lock.lock();
    }
    lock.unlock();
    for (auto& t : threads) t.join();
  }

  // Designs 2 and 2.A: queues behind the frame transport, one thread per
  // long-running worker.

  void run_queued() {
    const int n_nodes = plan_.cluster.n_nodes;
    std::vector<std::unique_ptr<QueueServer>> inputs;
    std::vector<std::unique_ptr<QueueServer>> outputs;

    auto seed = [](QueueServer& server, const std::vector<DataItem>& items) {
      QueueClient client(server);
      SenderId loader = client.connect();
      for (const auto& item : items) client.push(loader, item);
      client.done(loader);
    };

    if (plan_.design == Design::D2A) {
      auto a = Clock::now();
      for (NodeId n = 0; n < n_nodes; ++n) {
        nlohmann::json manifest = plan_.per_node_input->at(static_cast<std::size_t>(n));
        std::ofstream(node_dir(n) / "input.json") << manifest.dump();
      }
      sleep(over_.distribute_s.value_or(0.0));
      add_span("distribute", a, Clock::now());
    }

    auto a = Clock::now();
    if (plan_.design == Design::D2) {
      inputs.push_back(std::make_unique<QueueServer>());
      seed(*inputs[0], plan_.workload.items);
    } else {
      for (NodeId n = 0; n < n_nodes; ++n) {
        inputs.push_back(std::make_unique<QueueServer>());
        seed(*inputs.back(), plan_.per_node_input->at(static_cast<std::size_t>(n)));
      }
    }
    for (NodeId n = 0; n < n_nodes; ++n) outputs.push_back(std::make_unique<QueueServer>(proto_.queue_capacity));
    sleep(over_.queue_setup_s);
    add_span("setup", a, Clock::now());
    const auto seeded = Clock::now();

    std::vector<std::thread> threads;
    ReceiverId next_receiver = 1;
    for (NodeId n = 0; n < n_nodes; ++n) {
      QueueServer& in = plan_.design == Design::D2 ? *inputs[0] : *inputs[static_cast<std::size_t>(n)];
      QueueServer& out = *outputs[static_cast<std::size_t>(n)];
      for (int w = 0; w < plan_.workers(n, Stage::T1); ++w) {
        SenderId sender = QueueClient(out).connect();
        threads.emplace_back([this, &in, &out, n, sender, rid = next_receiver++, seeded] {
          t1_worker(in, out, n, sender, rid, seeded);
        });
      }
      for (int w = 0; w < plan_.workers(n, Stage::T2); ++w)
        threads.emplace_back([this, &out, n, rid = next_receiver++] { t2_worker(out, n, rid); });
    }
    for (auto& t : threads) t.join();
  }

  void t1_worker(QueueServer& in_server, QueueServer& out_server, NodeId node, SenderId sender,
                 ReceiverId rid, Clock::time_point seeded) {
    QueueClient in(in_server), out(out_server);
    while (!abort_) {
      PullResult r = in.pull(rid);
      if (r.is_empty()) break;
      if (r.is_wait()) {
        sleep(proto_.wait_interval_s);
        continue;
      }
      if (!run_task(*r.item, Stage::T1, node, seeded)) break;
      {
        std::lock_guard lock(log_mutex_);
        queued_at_[r.item->id] = Clock::now();
      }
      out.push(sender, *r.item);
    }
    out.done(sender);
  }

  void t2_worker(QueueServer& server, NodeId node, ReceiverId rid) {
    QueueClient q(server);
    while (!abort_) {
      PullResult r = q.pull(rid);
      if (r.is_empty()) break;
      if (r.is_wait()) {
        sleep(proto_.wait_interval_s);
        continue;
      }
      Clock::time_point queued;
      {
        std::lock_guard lock(log_mutex_);
        queued = queued_at_.at(r.item->id);
      }
      if (!run_task(*r.item, Stage::T2, node, queued)) break;
    }
  }

  const ExecutionPlan& plan_;
  OverheadConfig over_;
  ProtocolConfig proto_;
  std::uint64_t seed_;
  fs::path workdir_;
  LocalOptions opts_;
  std::array<PerfModel, 2> models_;

  Clock::time_point t0_;
  std::mutex log_mutex_;
  EventLog log_;
  TaskId next_task_ = 0;
  std::map<ItemId, Clock::time_point> queued_at_;
  std::atomic<bool> abort_{false};
  std::string error_;
};

}  // namespace

EventLog execute_local(const ExecutionPlan& plan, const ModelTable& models,
                       const OverheadConfig& overheads, const ProtocolConfig& protocol,
                       std::uint64_t seed, const std::filesystem::path& workdir,
                       const LocalOptions& options) {
  overheads.validate();
  if (!(protocol.wait_interval_s > 0.0)) throw ConfigError("wait_interval_s must be positive");
  if (!(options.time_scale > 0.0)) throw ConfigError("time_scale must be positive");
  check_feasible(plan);
  if (plan.design == Design::D2A && !plan.per_node_input)
    throw PlanningError("Design 2.A plan without an input partition");
  LocalRun run(plan, models, overheads, protocol, seed, workdir, options);
  return run.run();
}

double measure_spawn_cost(const std::filesystem::path& mock_task, const std::filesystem::path& scratch,
                          int samples) {
  std::filesystem::create_directories(scratch);
  double total = 0.0;
  for (int i = 0; i < samples; ++i) {
    SpawnTiming timing;
    auto out = scratch / ("probe-" + std::to_string(i));
    std::string err = run_mock(mock_task, 0.0, {}, out, timing);
    if (!err.empty()) throw ExecutionError(err, {});
    total += std::chrono::duration<double>(timing.reaped - timing.begin).count();
  }
  return total / samples;
}

}  // namespace wfsim
