#pragma once

#include <vector>

#include "wfsim/cluster.hpp"
#include "wfsim/engine.hpp"
#include "wfsim/perf_model.hpp"
#include "wfsim/workload.hpp"

namespace wfsim::testing {

inline std::array<TaskSpec, 2> uc1_pipeline() {
  return {TaskSpec{Stage::T1, 1, 0, 40000.0, "UC1/T1"}, TaskSpec{Stage::T2, 0, 1, 4000.0, "UC1/T2"}};
}

inline std::array<TaskSpec, 2> uc2_pipeline() {
  return {TaskSpec{Stage::T1, 0, 1, 30000.0, "UC2/T1"}, TaskSpec{Stage::T2, 1, 0, 30000.0, "UC2/T2"}};
}

inline ClusterSpec uc1_cluster(int nodes = 4) { return {nodes, 32, 2, 128000.0, {}}; }

inline WorkloadSpec workload_of(const std::vector<double>& sizes, UseCase uc = UseCase::UC1) {
  WorkloadSpec w;
  w.label = uc;
  w.pipeline = uc == UseCase::UC2 ? uc2_pipeline() : uc1_pipeline();
  for (std::size_t i = 0; i < sizes.size(); ++i)
    w.items.push_back({static_cast<ItemId>(i), sizes[i],
                       uc == UseCase::UC2 ? ItemKind::ImagePair : ItemKind::SingleImage});
  return w;
}

inline OverheadConfig zero_overheads() { return OverheadConfig{}; }

inline ModelTable noiseless_table() { return ModelTable(fitted_profile_rows(), 0.0); }

}  // namespace wfsim::testing
