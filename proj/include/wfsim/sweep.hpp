#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "wfsim/config.hpp"
#include "wfsim/event_log.hpp"
#include "wfsim/metrics.hpp"

namespace wfsim {

struct SimRun {
  ExecutionPlan plan;
  EventLog log;
  MetricsReport metrics;
  ValidationReport validation;
};

/// Plan, simulate, validate and measure one design on `workload`.
SimRun run_simulation(const ExperimentConfig& config, Design design, const WorkloadSpec& workload,
                      std::uint64_t seed);

struct SweepOutcome {
  Design design = Design::D1;
  std::uint64_t seed = 0;
  double makespan_s = 0.0;
  double imbalance_cv = 0.0;
  double predicted_t1_cv = 0.0;  // CV of per-node predicted T1 load (Design 2.A plan)
  double avg_cpu_util_pct = 0.0;
  double avg_gpu_util_pct = 0.0;
  bool valid = false;

  friend bool operator==(const SweepOutcome&, const SweepOutcome&) = default;
};

/// One simulation per (seed, design). With `reseed_dataset`, generator-based
/// workloads are regenerated from each seed; all designs of one seed share the
/// same dataset. Results are ordered seed-major, design-minor.
std::vector<SweepOutcome> sweep_serial(const ExperimentConfig& config, std::span<const Design> designs,
                                       std::span<const std::uint64_t> seeds, bool reseed_dataset);

/// Same results as sweep_serial, with the (seed, design) cases spread over
/// OpenMP threads.
std::vector<SweepOutcome> sweep_parallel(const ExperimentConfig& config, std::span<const Design> designs,
                                         std::span<const std::uint64_t> seeds, bool reseed_dataset);

}  // namespace wfsim
