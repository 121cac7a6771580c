// wfsim: generate workloads, run a design on the simulator or the local
// process backend, compare reports and fit the linear duration model.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "wfsim/analysis.hpp"
#include "wfsim/config.hpp"
#include "wfsim/errors.hpp"
#include "wfsim/metrics.hpp"
#include "wfsim/sweep.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace wfsim;

namespace {

struct Overrides {
  std::string design;
  std::string backend;
  std::optional<std::uint64_t> seed;
  std::string out;
};

json load_document(const std::string& config, const Overrides& o) {
  json doc = read_config_document(config);
  if (!o.design.empty() && o.design != "all") doc["design"] = o.design;
  if (!o.backend.empty()) doc["backend"] = o.backend;
  if (o.seed) doc["seed"] = *o.seed;
  if (!o.out.empty()) doc["out"] = o.out;
  return doc;
}

fs::path base_dir_of(const std::string& config) {
  fs::path p(config);
  return fs::exists(p) ? fs::absolute(p).parent_path() : fs::current_path();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
}

int cmd_generate(const std::string& config, const Overrides& o) {
  json doc = load_document(config, o);
  ExperimentConfig c = load_config(doc, base_dir_of(config));
  WorkloadSpec w = o.seed ? c.workload_for_seed(*o.seed) : c.workload;
  fs::path out = c.out_dir.empty() ? fs::path(".") : fs::path(c.out_dir);
  fs::create_directories(out);
  write_file(out / "dataset.json", json(w).dump(2) + "\n");
  write_file(out / "config.json", doc.dump(2) + "\n");
  std::cout << "wrote " << w.items.size() << " items (" << w.total_mb() << " MB) to "
            << (out / "dataset.json").string() << '\n';
  return 0;
}

int run_one(const ExperimentConfig& c, Design design, const fs::path& out, const std::string& mock_task) {
  fs::create_directories(out);
  ExecutionPlan plan = make_plan(design, c.workload, c.cluster, c.models, c.workers);
  EventLog log;
  if (c.backend == Backend::Sim) {
    log = simulate(plan, c.models, c.overheads, c.protocol, *c.seed);
  } else {
    LocalOptions opts = c.local;
    if (opts.mock_task.empty()) opts.mock_task = mock_task;
    log = execute_local(plan, c.models, c.overheads, c.protocol, c.seed.value_or(0), out / "nodes", opts);
  }
  ValidationReport report = validate_log(log, plan);
  MetricsReport metrics = compute_metrics(log, c.cluster, c.workload.pipeline);

  json doc = c.document;
  doc["design"] = to_string(design);
  write_file(out / "config.json", doc.dump(2) + "\n");
  {
    std::ostringstream csv;
    write_events_csv(csv, log);
    write_file(out / "events.csv", csv.str());
  }
  {
    std::ostringstream csv;
    write_overheads_csv(csv, log);
    write_file(out / "overheads.csv", csv.str());
  }
  write_file(out / "events.json", json(log).dump(1) + "\n");
  json mj = metrics;
  mj["valid"] = report.ok();
  mj["violations"] = report.violations;
  write_file(out / "metrics.json", mj.dump(2) + "\n");
  {
    std::ostringstream csv;
    write_timeline_csv(csv, metrics.util.cpu_timeline, c.cluster.total_cpus());
    write_file(out / "timeline_cpu.csv", csv.str());
  }
  {
    std::ostringstream csv;
    write_timeline_csv(csv, metrics.util.gpu_timeline, c.cluster.total_gpus());
    write_file(out / "timeline_gpu.csv", csv.str());
  }

  std::printf("design %-2s  makespan %10.2f s  cpu %6.2f%%  gpu %6.2f%%  imbalance %.4f  -> %s\n",
              std::string(to_string(design)).c_str(), metrics.makespan_s, metrics.util.avg_cpu_util_pct,
              metrics.util.avg_gpu_util_pct, metrics.imbalance_cv, out.string().c_str());
  if (!report.ok()) {
    std::cerr << "event log failed validation:\n";
    for (const auto& v : report.violations) std::cerr << "  " << v << '\n';
    return 1;
  }
  return 0;
}

std::vector<json> load_reports(const std::vector<std::string>& inputs) {
  std::vector<json> reports;
  for (const auto& in : inputs) {
    fs::path p(in);
    if (fs::is_directory(p)) p /= "metrics.json";
    std::ifstream f(p);
    if (!f) throw ConfigError("cannot open report " + p.string());
    json j = json::parse(f);
    j["source"] = p.parent_path().string();
    reports.push_back(std::move(j));
  }
  return reports;
}

std::string compare_table(const std::vector<json>& reports) {
  std::vector<std::string> names;
  for (const auto& r : reports)
    for (const auto& [k, v] : r.at("overheads").items())
      if (std::find(names.begin(), names.end(), k) == names.end()) names.push_back(k);
  std::sort(names.begin(), names.end());

  std::ostringstream csv;
  csv << "source,design,makespan_s,avg_cpu_util_pct,avg_gpu_util_pct,throughput_mb_s,imbalance_cv";
  for (const auto& n : names) csv << ",overhead_" << n << "_s";
  csv << '\n';
  for (const auto& r : reports) {
    csv << r.at("source").get<std::string>() << ',' << r.at("design").get<std::string>() << ','
        << r.at("makespan_s").get<double>() << ',' << r.at("avg_cpu_util_pct").get<double>() << ','
        << r.at("avg_gpu_util_pct").get<double>() << ',' << r.at("throughput_mb_s").get<double>() << ','
        << r.at("imbalance_cv").get<double>();
    for (const auto& n : names) csv << ',' << r.at("overheads").value(n, 0.0);
    csv << '\n';
  }
  return csv.str();
}

int cmd_run(const std::string& config, const Overrides& o, const std::string& mock_task) {
  json doc = load_document(config, o);
  ExperimentConfig c = load_config(doc, base_dir_of(config));
  fs::path out = c.out_dir.empty() ? fs::path("out") : fs::path(c.out_dir);
  if (o.design != "all") return run_one(c, c.design, out, mock_task);

  int rc = 0;
  std::vector<std::string> dirs;
  for (Design d : {Design::D1, Design::D2, Design::D2A}) {
    fs::path sub = out / ("design-" + std::string(to_string(d)));
    rc |= run_one(c, d, sub, mock_task);
    dirs.push_back(sub.string());
  }
  for (auto& d : dirs) d = (fs::path(d) / "metrics.json").string();
  std::string table = compare_table(load_reports(dirs));
  write_file(out / "compare.csv", table);
  std::cout << table;
  return rc;
}

int cmd_compare(const std::vector<std::string>& inputs, const std::string& out) {
  std::string table = compare_table(load_reports(inputs));
  if (!out.empty()) {
    fs::create_directories(out);
    write_file(fs::path(out) / "compare.csv", table);
  }
  std::cout << table;
  return 0;
}

struct FitArgs {
  std::string events;
  std::string stage = "T1";
  std::string design = "unknown";
  std::optional<double> bin_width;
  std::optional<double> origin;
  std::optional<double> upper;
  bool bin_means = false;
  bool all_bins = false;
  std::string out;
};

int cmd_fit(const FitArgs& a) {
  std::ifstream in(a.events);
  if (!in) throw ConfigError("cannot open " + a.events);
  Stage stage = parse_stage(a.stage);
  std::vector<Sample> points;
  for (const auto& r : read_events_csv(in))
    if (r.stage == stage) points.push_back({r.size_mb, r.duration()});
  if (points.size() < 2) throw DegenerateFitError("need at least two records for stage " + a.stage);

  auto [lo_it, hi_it] = std::minmax_element(points.begin(), points.end(),
                                            [](const Sample& x, const Sample& y) { return x.size_mb < y.size_mb; });
  double origin = a.origin.value_or(lo_it->size_mb);
  double upper = a.upper.value_or(hi_it->size_mb);
  double width = a.bin_width.value_or((upper - origin) / 22.0);
  if (!(upper > origin)) throw DegenerateFitError("all records have the same size");
  auto bins = bin_items(points, width, origin, upper);
  BinRange range = a.all_bins ? BinRange{0, static_cast<int>(bins.size()) - 1} : select_bins(bins);
  FitResult fit = fit_bins(bins, range, a.bin_means);

  json row = fit_row(a.design, a.stage, fit);
  std::string text = row.dump(2) + "\n";
  if (!a.out.empty()) {
    fs::create_directories(a.out);
    write_file(fs::path(a.out) / "fit.json", text);
  }
  std::cout << text;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wfsim - two-stage workflow designs on a simulated or local cluster"};
  app.require_subcommand(1);

  Overrides o;
  std::string config;
  std::string mock_task = WFSIM_MOCK_TASK;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config, "experiment JSON file or builtin name (uc1-desk, uc2-desk)")->required();
    sub->add_option("--seed", o.seed, "seed override");
    sub->add_option("--out", o.out, "output directory");
  };

  auto* gen = app.add_subcommand("generate", "write the configured dataset as dataset.json");
  add_common(gen);

  auto* run = app.add_subcommand("run", "execute one design (or all) and write logs and metrics");
  add_common(run);
  run->add_option("--design", o.design, "1, 2, 2a or all")->check(CLI::IsMember({"1", "2", "2a", "all"}));
  run->add_option("--backend", o.backend, "sim or local")->check(CLI::IsMember({"sim", "local"}));
  run->add_option("--mock-task", mock_task, "mock task executable for the local backend");

  std::vector<std::string> reports;
  std::string compare_out;
  auto* cmp = app.add_subcommand("compare", "tabulate metrics.json reports into compare.csv");
  cmp->add_option("reports", reports, "metrics.json files or run directories")->required();
  cmp->add_option("--out", compare_out, "directory for compare.csv");

  FitArgs fa;
  auto* fit = app.add_subcommand("fit", "fit duration = alpha * size + beta to one stage of an events.csv");
  fit->add_option("--events", fa.events, "events.csv")->required();
  fit->add_option("--stage", fa.stage, "T1 or T2")->check(CLI::IsMember({"T1", "T2"}));
  fit->add_option("--design", fa.design, "label written to fit.json");
  fit->add_option("--bin-width", fa.bin_width, "bin width in MB (default: range / 22)");
  fit->add_option("--origin", fa.origin, "first bin edge in MB (default: smallest size)");
  fit->add_option("--upper", fa.upper, "last bin edge in MB (default: largest size)");
  fit->add_flag("--bin-means", fa.bin_means, "fit per-bin means instead of raw points");
  fit->add_flag("--all-bins", fa.all_bins, "keep head and tail bins");
  fit->add_option("--out", fa.out, "directory for fit.json");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) return cmd_generate(config, o);
    if (*run) return cmd_run(config, o, mock_task);
    if (*cmp) return cmd_compare(reports, compare_out);
    if (*fit) return cmd_fit(fa);
  } catch (const PlanningError& e) {
    std::cerr << "wfsim: " << e.what() << '\n';
    return 2;
  } catch (const ExecutionError& e) {
    std::cerr << "wfsim: local execution aborted: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "wfsim: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
