#include "wfsim/config.hpp"

#include <fstream>

#include "wfsim/errors.hpp"

namespace wfsim {

namespace fs = std::filesystem;
using nlohmann::json;

std::array<TaskSpec, 2> default_pipeline(UseCase label) {
  switch (label) {
    case UseCase::UC1:
      // 3 x 40000 + 2 x 4000 = 128000 MB: exactly three tilers and two
      // GPU counters per node.
      return {TaskSpec{Stage::T1, 1, 0, 40000.0, "UC1/T1"}, TaskSpec{Stage::T2, 0, 1, 4000.0, "UC1/T2"}};
    case UseCase::UC2:
      return {TaskSpec{Stage::T1, 0, 1, 30000.0, "UC2/T1"}, TaskSpec{Stage::T2, 1, 0, 30000.0, "UC2/T2"}};
    case UseCase::Custom: break;
  }
  throw ConfigError("Custom workloads need an explicit pipeline");
}

namespace {

json common_sections() {
  return {
      {"cluster", {{"n_nodes", 4}, {"cpus_per_node", 32}, {"gpus_per_node", 2}, {"mem_per_node_mb", 128000.0}}},
      {"profile", "fitted"},
      {"noise_sigma", 0.15},
      {"floor_s", 0.1},
      {"overheads",
       {{"dataset_discovery_s", 5.0},
        {"scheduler_latency_s", 1.25},
        {"task_bootstrap_s", 0.5},
        {"task_teardown_s", 0.2},
        {"queue_setup_s", 20.0},
        {"distribute_s", 7.5}}},
      {"wait_interval_s", 1.0},
      {"design", "2a"},
      {"backend", "sim"},
      {"seed", 7},
  };
}

DatasetParams read_params(const json& g) {
  DatasetParams p;
  p.count = g.at("count").get<std::size_t>();
  p.mean_mb = g.at("mean_mb").get<double>();
  p.std_mb = g.at("std_mb").get<double>();
  p.min_mb = g.at("min_mb").get<double>();
  p.max_mb = g.at("max_mb").get<double>();
  return p;
}

std::uint64_t derived_seed(std::uint64_t seed, std::uint64_t salt) { return seed * 1000003ULL + salt; }

}  // namespace

std::vector<std::string> builtin_config_names() { return {"uc1-desk", "uc2-desk"}; }

json builtin_config(std::string_view name) {
  json doc = common_sections();
  if (name == "uc1-desk") {
    doc["workload"] = {{"label", "UC1"},
                       {"generator",
                        {{"count", 60}, {"mean_mb", 1304.85}, {"std_mb", 512.68}, {"min_mb", 50.0}, {"max_mb", 2770.0}, {"seed", 1}}}};
    return doc;
  }
  if (name == "uc2-desk") {
    json images = {{"count", 20}, {"mean_mb", 6.13}, {"std_mb", 1.79}, {"min_mb", 1.5}, {"max_mb", 5.5}};
    json sources = images, targets = images;
    sources["seed"] = 2;
    targets["seed"] = 3;
    doc["workload"] = {{"label", "UC2"}, {"pairs", {{"sources", sources}, {"targets", targets}}}};
    return doc;
  }
  throw ConfigError("unknown builtin config: " + std::string(name));
}

json read_config_document(const std::string& path_or_name) {
  for (const auto& name : builtin_config_names())
    if (path_or_name == name) return builtin_config(name);
  std::ifstream in(path_or_name);
  if (!in) throw ConfigError("cannot open config " + path_or_name);
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) throw ConfigError("config " + path_or_name + " is not a JSON object");
  return doc;
}

WorkloadSpec build_workload(const json& section, const fs::path& base_dir,
                            std::optional<std::uint64_t> seed_override) {
  try {
    if (section.contains("fixture"))
      return build_workload(builtin_config(section.at("fixture").get<std::string>()).at("workload"), base_dir,
                            seed_override);
    if (section.contains("file")) {
      fs::path path = section.at("file").get<std::string>();
      if (path.is_relative()) path = base_dir / path;
      std::ifstream in(path);
      if (!in) throw ConfigError("cannot open workload file " + path.string());
      return json::parse(in).get<WorkloadSpec>();
    }

    WorkloadSpec w;
    w.label = parse_use_case(section.value("label", std::string("Custom")));
    if (section.contains("pipeline")) {
      const auto& pipe = section.at("pipeline");
      if (!pipe.is_array() || pipe.size() != 2) throw ConfigError("pipeline must have exactly two stages");
      w.pipeline = {pipe[0].get<TaskSpec>(), pipe[1].get<TaskSpec>()};
    } else {
      w.pipeline = default_pipeline(w.label);
    }

    auto seed_of = [&](const json& g, std::uint64_t salt) {
      return seed_override ? derived_seed(*seed_override, salt) : g.value("seed", std::uint64_t{0});
    };
    if (section.contains("items")) {
      w.items = section.at("items").get<std::vector<DataItem>>();
    } else if (section.contains("generator")) {
      const auto& g = section.at("generator");
      w.items = generate_dataset(read_params(g), seed_of(g, 0));
    } else if (section.contains("pairs")) {
      const auto& s = section.at("pairs").at("sources");
      const auto& t = section.at("pairs").at("targets");
      auto sources = generate_dataset(read_params(s), seed_of(s, 1));
      auto targets = generate_dataset(read_params(t), seed_of(t, 2));
      w.items = generate_pairs(sources, targets);
    } else {
      throw ConfigError("workload section needs fixture, file, items, generator or pairs");
    }
    w.validate();
    return w;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("workload section: ") + e.what());
  }
}

WorkloadSpec ExperimentConfig::workload_for_seed(std::uint64_t s) const {
  return build_workload(workload_section, base_dir, s);
}

ExperimentConfig load_config(const json& doc, const fs::path& base_dir) {
  ExperimentConfig c;
  c.document = doc;
  c.base_dir = base_dir;
  try {
    c.workload_section = doc.at("workload");
    c.workload = build_workload(c.workload_section, base_dir);
    c.cluster = doc.at("cluster").get<ClusterSpec>();
    c.design = parse_design(doc.value("design", std::string("2a")));

    double sigma = doc.value("noise_sigma", 0.15);
    double floor_s = doc.value("floor_s", 0.1);
    std::vector<ProfileRow> rows;
    const json profile = doc.value("profile", json("fitted"));
    if (profile.is_string()) {
      auto name = profile.get<std::string>();
      if (name == "fitted") {
        rows = fitted_profile_rows();
      } else if (name == "published") {
        rows = published_profile_rows();
      } else {
        throw ConfigError("unknown profile " + name);
      }
    } else {
      rows = profile.get<std::vector<ProfileRow>>();
    }
    c.models = ModelTable(rows, sigma, floor_s);
    for (const auto& row : doc.value("profile_overrides", std::vector<ProfileRow>{})) c.models.set(row);
    // Resolve now so a missing row fails before any run starts.
    for (const auto& task : c.workload.pipeline) c.models.lookup(c.design, task.perf_model_id);

    if (doc.contains("overheads")) c.overheads = doc.at("overheads").get<OverheadConfig>();
    c.overheads.validate();
    c.protocol.wait_interval_s = doc.value("wait_interval_s", 1.0);
    if (!(c.protocol.wait_interval_s > 0.0)) throw ConfigError("wait_interval_s must be positive");
    if (doc.contains("queue_capacity")) c.protocol.queue_capacity = doc.at("queue_capacity").get<std::size_t>();

    if (doc.contains("workers")) {
      const auto& w = doc.at("workers");
      if (w.contains("T1")) c.workers.t1 = w.at("T1").get<int>();
      if (w.contains("T2")) c.workers.t2 = w.at("T2").get<int>();
    }

    auto backend = doc.value("backend", std::string("sim"));
    if (backend == "sim") {
      c.backend = Backend::Sim;
    } else if (backend == "local") {
      c.backend = Backend::Local;
    } else {
      throw ConfigError("unknown backend " + backend);
    }
    if (doc.contains("seed") && !doc.at("seed").is_null()) c.seed = doc.at("seed").get<std::uint64_t>();
    if (c.backend == Backend::Sim && !c.seed) throw ConfigError("the sim backend requires a seed");
    c.out_dir = doc.value("out", std::string());
    if (doc.contains("local")) {
      const auto& l = doc.at("local");
      c.local.mock_task = l.value("mock_task", std::string());
      c.local.time_scale = l.value("time_scale", 1.0);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return c;
}

void to_json(json& j, const OverheadConfig& o) {
  j = {{"dataset_discovery_s", o.dataset_discovery_s},
       {"scheduler_latency_s", o.scheduler_latency_s},
       {"task_bootstrap_s", o.task_bootstrap_s},
       {"task_teardown_s", o.task_teardown_s},
       {"queue_setup_s", o.queue_setup_s}};
  j["distribute_s"] = o.distribute_s ? json(*o.distribute_s) : json("measured");
}

void from_json(const json& j, OverheadConfig& o) {
  o.dataset_discovery_s = j.value("dataset_discovery_s", 0.0);
  o.scheduler_latency_s = j.value("scheduler_latency_s", 0.0);
  o.task_bootstrap_s = j.value("task_bootstrap_s", 0.0);
  o.task_teardown_s = j.value("task_teardown_s", 0.0);
  o.queue_setup_s = j.value("queue_setup_s", 0.0);
  if (!j.contains("distribute_s")) {
    o.distribute_s = 0.0;
  } else if (const auto& d = j.at("distribute_s"); d.is_string()) {
    if (d.get<std::string>() != "measured") throw ConfigError("distribute_s must be a number or \"measured\"");
    o.distribute_s = std::nullopt;
  } else {
    o.distribute_s = d.get<double>();
  }
}

}  // namespace wfsim
