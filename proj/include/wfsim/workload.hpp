#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace wfsim {

enum class ItemKind { SingleImage, ImagePair };
enum class Stage { T1, T2 };
enum class UseCase { UC1, UC2, Custom };
/// Execution design. Text form is "1", "2" or "2a".
enum class Design { D1, D2, D2A };

std::string_view to_string(ItemKind kind);
std::string_view to_string(Stage stage);
std::string_view to_string(UseCase label);
std::string_view to_string(Design design);
ItemKind parse_item_kind(std::string_view text);
Stage parse_stage(std::string_view text);
UseCase parse_use_case(std::string_view text);
Design parse_design(std::string_view text);

constexpr int stage_index(Stage stage) { return stage == Stage::T1 ? 0 : 1; }

using ItemId = std::uint64_t;

struct DataItem {
  ItemId id = 0;
  double size_mb = 0.0;
  ItemKind kind = ItemKind::SingleImage;

  friend bool operator==(const DataItem&, const DataItem&) = default;
};

/// Resource demand of one program-task. `perf_model_id` names a row family in
/// the model table, e.g. "UC1/T1".
struct TaskSpec {
  Stage stage = Stage::T1;
  int cpu_cores = 0;
  int gpus = 0;
  double mem_mb = 0.0;
  std::string perf_model_id;

  friend bool operator==(const TaskSpec&, const TaskSpec&) = default;
};

struct WorkloadSpec {
  UseCase label = UseCase::Custom;
  std::vector<DataItem> items;
  std::array<TaskSpec, 2> pipeline;

  const TaskSpec& task(Stage stage) const { return pipeline[stage_index(stage)]; }
  double total_mb() const;

  /// Throws ConfigError on duplicate ids, non-positive sizes or a malformed
  /// pipeline.
  void validate() const;

  friend bool operator==(const WorkloadSpec&, const WorkloadSpec&) = default;
};

struct DatasetParams {
  std::size_t count = 0;
  double mean_mb = 0.0;
  double std_mb = 0.0;
  double min_mb = 0.0;
  double max_mb = 0.0;
};

// Truncated normal by rejection. Ids are assigned 0..count-1.
std::vector<DataItem> generate_dataset(const DatasetParams& params, std::uint64_t seed);

// Cartesian product; each pair's size is the sum of both images.
std::vector<DataItem> generate_pairs(std::span<const DataItem> sources,
                                     std::span<const DataItem> targets);

struct Sample {
  double size_mb = 0.0;
  double duration_s = 0.0;
};

struct SizeBin {
  int index = 0;
  double lo = 0.0;
  double hi = 0.0;
  std::vector<Sample> values;
};

/// Bin k covers [origin + k*width, origin + (k+1)*width). Without `upper` the
/// bins run up to the one holding the largest value; with `upper` there are
/// ceil((upper - origin) / width) bins and a value equal to `upper` lands in
/// the last one. Values outside the range are a ConfigError.
std::vector<SizeBin> bin_items(std::span<const Sample> values, double bin_width, double origin,
                               std::optional<double> upper = std::nullopt);

void to_json(nlohmann::json& j, const DataItem& item);
void from_json(const nlohmann::json& j, DataItem& item);
void to_json(nlohmann::json& j, const TaskSpec& task);
void from_json(const nlohmann::json& j, TaskSpec& task);
void to_json(nlohmann::json& j, const WorkloadSpec& workload);
void from_json(const nlohmann::json& j, WorkloadSpec& workload);

}  // namespace wfsim
