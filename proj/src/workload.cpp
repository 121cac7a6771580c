#include "wfsim/workload.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <unordered_set>

#include "wfsim/errors.hpp"

namespace wfsim {

std::string_view to_string(ItemKind kind) {
  return kind == ItemKind::SingleImage ? "SingleImage" : "ImagePair";
}

std::string_view to_string(Stage stage) { return stage == Stage::T1 ? "T1" : "T2"; }

std::string_view to_string(UseCase label) {
  switch (label) {
    case UseCase::UC1: return "UC1";
    case UseCase::UC2: return "UC2";
    case UseCase::Custom: return "Custom";
  }
  return "Custom";
}

std::string_view to_string(Design design) {
  switch (design) {
    case Design::D1: return "1";
    case Design::D2: return "2";
    case Design::D2A: return "2a";
  }
  return "1";
}

Design parse_design(std::string_view text) {
  if (text == "1") return Design::D1;
  if (text == "2") return Design::D2;
  if (text == "2a" || text == "2A") return Design::D2A;
  throw ConfigError("unknown design: " + std::string(text));
}

ItemKind parse_item_kind(std::string_view text) {
  if (text == "SingleImage") return ItemKind::SingleImage;
  if (text == "ImagePair") return ItemKind::ImagePair;
  throw ConfigError("unknown item kind: " + std::string(text));
}

Stage parse_stage(std::string_view text) {
  if (text == "T1") return Stage::T1;
  if (text == "T2") return Stage::T2;
  throw ConfigError("unknown stage: " + std::string(text));
}

UseCase parse_use_case(std::string_view text) {
  if (text == "UC1") return UseCase::UC1;
  if (text == "UC2") return UseCase::UC2;
  if (text == "Custom") return UseCase::Custom;
  throw ConfigError("unknown use case: " + std::string(text));
}

double WorkloadSpec::total_mb() const {
  double total = 0.0;
  for (const auto& item : items) total += item.size_mb;
  return total;
}

void WorkloadSpec::validate() const {
  if (pipeline[0].stage != Stage::T1 || pipeline[1].stage != Stage::T2)
    throw ConfigError("pipeline must be (T1, T2)");
  for (const auto& task : pipeline) {
    if (task.cpu_cores < 0 || task.gpus < 0 || task.mem_mb < 0.0)
      throw ConfigError("negative task demand");
    if (task.cpu_cores + task.gpus < 1)
      throw ConfigError("task " + std::string(to_string(task.stage)) + " demands no compute");
  }
  std::unordered_set<ItemId> seen;
  for (const auto& item : items) {
    if (!(item.size_mb > 0.0)) throw ConfigError("item size must be positive");
    if (!seen.insert(item.id).second)
      throw ConfigError("duplicate item id " + std::to_string(item.id));
  }
}

namespace {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

}  // namespace

std::vector<DataItem> generate_dataset(const DatasetParams& p, std::uint64_t seed) {
  if (p.count == 0) throw ConfigError("dataset count must be positive");
  if (!(p.min_mb > 0.0) || !(p.max_mb > 0.0) || p.std_mb < 0.0 || p.min_mb > p.max_mb)
    throw ConfigError("invalid dataset bounds");
  if (p.std_mb == 0.0) {
    if (p.mean_mb < p.min_mb || p.mean_mb > p.max_mb)
      throw ConfigError("mean outside [min, max] with zero variance");
  } else {
    if (!(p.min_mb < p.max_mb)) throw ConfigError("min must be below max when std > 0");
    // The mean may sit outside the window (the UC2 statistics do); only reject
    // windows that rejection sampling would practically never hit.
    double mass = normal_cdf((p.max_mb - p.mean_mb) / p.std_mb) -
                  normal_cdf((p.min_mb - p.mean_mb) / p.std_mb);
    if (mass < 1e-4) throw ConfigError("truncation window holds negligible probability mass");
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(p.mean_mb, p.std_mb);
  std::vector<DataItem> items;
  items.reserve(p.count);
  for (std::size_t i = 0; i < p.count; ++i) {
    double size = p.mean_mb;
    if (p.std_mb > 0.0) {
      do {
        size = normal(rng);
      } while (size < p.min_mb || size > p.max_mb);
    }
    items.push_back({static_cast<ItemId>(i), size, ItemKind::SingleImage});
  }
  return items;
}

std::vector<DataItem> generate_pairs(std::span<const DataItem> sources,
                                     std::span<const DataItem> targets) {
  if (sources.empty() || targets.empty()) throw ConfigError("pair generation needs two non-empty sets");
  std::vector<DataItem> pairs;
  pairs.reserve(sources.size() * targets.size());
  ItemId next = 0;
  for (const auto& s : sources)
    for (const auto& t : targets) pairs.push_back({next++, s.size_mb + t.size_mb, ItemKind::ImagePair});
  return pairs;
}

std::vector<SizeBin> bin_items(std::span<const Sample> values, double bin_width, double origin,
                               std::optional<double> upper) {
  if (!(bin_width > 0.0)) throw ConfigError("bin width must be positive");
  std::size_t n_bins = 0;
  if (upper) {
    if (!(*upper > origin)) throw ConfigError("bin range upper bound must exceed origin");
    n_bins = static_cast<std::size_t>(std::ceil((*upper - origin) / bin_width - 1e-9));
  } else if (!values.empty()) {
    double hi = std::max_element(values.begin(), values.end(), [](const Sample& a, const Sample& b) {
                  return a.size_mb < b.size_mb;
                })->size_mb;
    if (hi < origin) throw ConfigError("value below bin origin");
    n_bins = static_cast<std::size_t>(std::floor((hi - origin) / bin_width)) + 1;
  }

  std::vector<SizeBin> bins(n_bins);
  for (std::size_t k = 0; k < n_bins; ++k) {
    bins[k].index = static_cast<int>(k);
    bins[k].lo = origin + static_cast<double>(k) * bin_width;
    bins[k].hi = origin + static_cast<double>(k + 1) * bin_width;
  }
  for (const auto& v : values) {
    if (v.size_mb < origin || (upper && v.size_mb > *upper))
      throw ConfigError("value " + std::to_string(v.size_mb) + " outside bin range");
    auto k = static_cast<std::size_t>(std::floor((v.size_mb - origin) / bin_width));
    if (k >= n_bins) k = n_bins - 1;
    bins[k].values.push_back(v);
  }
  return bins;
}

void to_json(nlohmann::json& j, const DataItem& item) {
  j = {{"id", item.id}, {"size_mb", item.size_mb}, {"kind", to_string(item.kind)}};
}

void from_json(const nlohmann::json& j, DataItem& item) {
  item.id = j.at("id").get<ItemId>();
  item.size_mb = j.at("size_mb").get<double>();
  item.kind = parse_item_kind(j.value("kind", std::string("SingleImage")));
}

void to_json(nlohmann::json& j, const TaskSpec& task) {
  j = {{"stage", to_string(task.stage)},
       {"cpu_cores", task.cpu_cores},
       {"gpus", task.gpus},
       {"mem_mb", task.mem_mb},
       {"perf_model_id", task.perf_model_id}};
}

void from_json(const nlohmann::json& j, TaskSpec& task) {
  task.stage = parse_stage(j.at("stage").get<std::string>());
  task.cpu_cores = j.value("cpu_cores", 0);
  task.gpus = j.value("gpus", 0);
  task.mem_mb = j.value("mem_mb", 0.0);
  task.perf_model_id = j.value("perf_model_id", std::string());
}

void to_json(nlohmann::json& j, const WorkloadSpec& workload) {
  j = {{"label", to_string(workload.label)},
       {"items", workload.items},
       {"pipeline", workload.pipeline}};
}

void from_json(const nlohmann::json& j, WorkloadSpec& workload) {
  workload.label = parse_use_case(j.value("label", std::string("Custom")));
  workload.items = j.at("items").get<std::vector<DataItem>>();
  const auto& pipe = j.at("pipeline");
  if (!pipe.is_array() || pipe.size() != 2) throw ConfigError("pipeline must have exactly two stages");
  workload.pipeline = {pipe[0].get<TaskSpec>(), pipe[1].get<TaskSpec>()};
  workload.validate();
}

}  // namespace wfsim
