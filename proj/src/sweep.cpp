#include "wfsim/sweep.hpp"

#include <cmath>
#include <exception>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace wfsim {

SimRun run_simulation(const ExperimentConfig& config, Design design, const WorkloadSpec& workload,
                      std::uint64_t seed) {
  SimRun run{make_plan(design, workload, config.cluster, config.models, config.workers), {}, {}, {}};
  run.log = simulate(run.plan, config.models, config.overheads, config.protocol, seed);
  run.validation = validate_log(run.log, run.plan);
  run.metrics = compute_metrics(run.log, config.cluster, workload.pipeline);
  return run;
}

namespace {

double predicted_cv(const ExecutionPlan& plan, const ModelTable& models) {
  if (!plan.per_node_input) return 0.0;
  PerfModel model = models.lookup(plan.design, plan.workload.task(Stage::T1).perf_model_id);
  std::vector<double> load;
  for (const auto& part : *plan.per_node_input) {
    double total = 0.0;
    for (const auto& item : part) total += predict_duration(model, item.size_mb);
    load.push_back(total);
  }
  double mean = 0.0;
  for (double l : load) mean += l;
  mean /= static_cast<double>(load.size());
  if (mean == 0.0) return 0.0;
  double var = 0.0;
  for (double l : load) var += (l - mean) * (l - mean);
  return std::sqrt(var / static_cast<double>(load.size())) / mean;
}

SweepOutcome run_case(const ExperimentConfig& config, const WorkloadSpec& workload, Design design,
                      std::uint64_t seed) {
  SimRun run = run_simulation(config, design, workload, seed);
  return {design,
          seed,
          run.metrics.makespan_s,
          run.metrics.imbalance_cv,
          predicted_cv(run.plan, config.models),
          run.metrics.util.avg_cpu_util_pct,
          run.metrics.util.avg_gpu_util_pct,
          run.validation.ok()};
}

}  // namespace

std::vector<SweepOutcome> sweep_serial(const ExperimentConfig& config, std::span<const Design> designs,
                                       std::span<const std::uint64_t> seeds, bool reseed_dataset) {
  std::vector<SweepOutcome> out;
  out.reserve(seeds.size() * designs.size());
  for (std::uint64_t seed : seeds) {
    WorkloadSpec workload = reseed_dataset ? config.workload_for_seed(seed) : config.workload;
    for (Design d : designs) out.push_back(run_case(config, workload, d, seed));
  }
  return out;
}

std::vector<SweepOutcome> sweep_parallel(const ExperimentConfig& config, std::span<const Design> designs,
                                         std::span<const std::uint64_t> seeds, bool reseed_dataset) {
  const auto n_seeds = static_cast<long>(seeds.size());
  const auto n_designs = static_cast<long>(designs.size());
  std::vector<WorkloadSpec> workloads(seeds.size());
  std::vector<SweepOutcome> out(seeds.size() * designs.size());
  std::exception_ptr error;

#pragma omp parallel for schedule(dynamic)
  for (long s = 0; s < n_seeds; ++s) {
    try {
      workloads[static_cast<std::size_t>(s)] =
          reseed_dataset ? config.workload_for_seed(seeds[static_cast<std::size_t>(s)]) : config.workload;
    } catch (...) {
#pragma omp critical
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);

#pragma omp parallel for schedule(dynamic)
  for (long k = 0; k < n_seeds * n_designs; ++k) {
    auto s = static_cast<std::size_t>(k / n_designs);
    auto d = static_cast<std::size_t>(k % n_designs);
    try {
      out[static_cast<std::size_t>(k)] = run_case(config, workloads[s], designs[d], seeds[s]);
    } catch (...) {
#pragma omp critical
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
  return out;
}

}  // namespace wfsim
