#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "wfsim/cluster.hpp"
#include "wfsim/designs.hpp"
#include "wfsim/engine.hpp"
#include "wfsim/perf_model.hpp"
#include "wfsim/workload.hpp"

namespace wfsim {

enum class Backend { Sim, Local };

/// One experiment document. See README for the schema.
struct ExperimentConfig {
  nlohmann::json workload_section;
  std::filesystem::path base_dir;
  WorkloadSpec workload;
  ClusterSpec cluster;
  Design design = Design::D2A;
  ModelTable models;
  OverheadConfig overheads;
  ProtocolConfig protocol;
  WorkerOverride workers;
  Backend backend = Backend::Sim;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  LocalOptions local;
  /// The resolved document, written next to outputs for provenance.
  nlohmann::json document;

  /// Rebuild the workload with every generator seed replaced by `seed`
  /// (distinct per generator). Inline or file workloads are returned as is.
  WorkloadSpec workload_for_seed(std::uint64_t seed) const;
};

/// Names accepted in place of a config path.
std::vector<std::string> builtin_config_names();
/// Throws ConfigError for unknown names.
nlohmann::json builtin_config(std::string_view name);

/// `path_or_name` is a JSON file or a builtin name such as "uc1-desk".
nlohmann::json read_config_document(const std::string& path_or_name);

/// Validates and resolves a document; `base_dir` anchors relative paths.
ExperimentConfig load_config(const nlohmann::json& document, const std::filesystem::path& base_dir = {});

/// Workload section forms:
///   {"fixture": "uc1-desk"}
///   {"file": "dataset.json"}
///   {"label": ..., "items": [...], "pipeline": [...]}
///   {"label": ..., "generator": {count, mean_mb, std_mb, min_mb, max_mb, seed}}
///   {"label": ..., "pairs": {"sources": {...}, "targets": {...}}}
/// `pipeline` is optional for UC1/UC2 labels.
WorkloadSpec build_workload(const nlohmann::json& section, const std::filesystem::path& base_dir,
                            std::optional<std::uint64_t> seed_override = std::nullopt);

/// Default task demands for the two use cases on 128 GB nodes: UC1 fits three
/// T1 and two T2 per node, UC2 two T1 and two T2.
std::array<TaskSpec, 2> default_pipeline(UseCase label);

}  // namespace wfsim
