#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "wfsim/designs.hpp"
#include "wfsim/event_log.hpp"
#include "wfsim/perf_model.hpp"

namespace wfsim {

struct OverheadConfig {
  double dataset_discovery_s = 0.0;
  /// Per task, serialized through the single Design 1 dispatcher.
  double scheduler_latency_s = 0.0;
  double task_bootstrap_s = 0.0;
  double task_teardown_s = 0.0;
  /// Designs 2 and 2.A.
  double queue_setup_s = 0.0;
  /// Design 2.A. nullopt: use the measured partitioning time.
  std::optional<double> distribute_s = 0.0;

  void validate() const;
};

struct ProtocolConfig {
  /// Delay before a receiver that got Wait pulls again.
  double wait_interval_s = 1.0;
  std::optional<std::size_t> queue_capacity;
};

struct SimStats {
  std::uint64_t events = 0;
  std::uint64_t data_pulls = 0;
  std::uint64_t wait_pulls = 0;
  std::uint64_t empty_pulls = 0;
};

/// Discrete-event execution in virtual time. Equal timestamps are ordered by
/// insertion sequence, so the log is a pure function of the arguments.
/// Durations for (item, stage) come from a stream seeded by (seed, item,
/// stage), so every design sees the same noise draws for the same seed.
EventLog simulate(const ExecutionPlan& plan, const ModelTable& models,
                  const OverheadConfig& overheads, const ProtocolConfig& protocol,
                  std::uint64_t seed, SimStats* stats = nullptr);

/// Duration the simulator assigns to (item, stage) on `node`.
double task_duration(const PerfModel& model, const DataItem& item, Stage stage,
                     const ClusterSpec& cluster, NodeId node, std::uint64_t seed);

struct LocalOptions {
  std::filesystem::path mock_task;
  /// Sampled durations are multiplied by this before sleeping.
  double time_scale = 1.0;
};

/// Raised when a program-task cannot be spawned or fails; carries whatever was
/// logged before the abort.
struct ExecutionError : std::runtime_error {
  ExecutionError(const std::string& what, EventLog partial)
      : std::runtime_error(what), log(std::move(partial)) {}
  EventLog log;
};

/// Runs every task as a spawned mock-task process. Logical nodes are
/// directories `workdir/node-<k>`; T1 writes `item-<id>.t1`, T2 reads it and
/// writes `item-<id>.t2`. Wall-clock timestamps relative to the run start.
EventLog execute_local(const ExecutionPlan& plan, const ModelTable& models,
                       const OverheadConfig& overheads, const ProtocolConfig& protocol,
                       std::uint64_t seed, const std::filesystem::path& workdir,
                       const LocalOptions& options);

/// Mean wall seconds to spawn and reap a zero-sleep mock task.
double measure_spawn_cost(const std::filesystem::path& mock_task,
                          const std::filesystem::path& scratch, int samples = 10);

void to_json(nlohmann::json& j, const OverheadConfig& o);
void from_json(const nlohmann::json& j, OverheadConfig& o);

}  // namespace wfsim
