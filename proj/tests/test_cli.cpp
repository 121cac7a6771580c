#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string output;
};

Result run(const std::string& args) {
  fs::path log = fs::temp_directory_path() / ("wfsim-cli-" + std::to_string(::getpid()) + ".log");
  std::string cmd = std::string(WFSIM_CLI) + " " + args + " > " + log.string() + " 2>&1";
  int status = std::system(cmd.c_str());
  std::ifstream in(log);
  std::stringstream ss;
  ss << in.rdbuf();
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, ss.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("wfsim-cli-" + name + "-" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("run twice with the same seed gives identical outputs") {
  auto dir = scratch("det");
  auto a = run("run --config uc1-desk --design 2a --backend sim --seed 7 --out " + (dir / "a").string());
  auto b = run("run --config uc1-desk --design 2a --backend sim --seed 7 --out " + (dir / "b").string());
  REQUIRE(a.code == 0);
  REQUIRE(b.code == 0);
  for (const char* f : {"events.csv", "overheads.csv", "metrics.json", "timeline_cpu.csv"}) {
    CAPTURE(f);
    CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));
    CHECK(!slurp(dir / "a" / f).empty());
  }
  CHECK(slurp(dir / "a" / "events.csv").rfind("task_id,item_id,stage,node_id,size_mb,t_submit,t_start,t_end", 0) == 0);
  fs::remove_all(dir);
}

TEST_CASE("all designs in one directory plus comparison") {
  auto dir = scratch("all");
  auto r = run("run --config uc2-desk --design all --seed 3 --out " + dir.string());
  REQUIRE(r.code == 0);
  for (const char* d : {"design-1", "design-2", "design-2a"}) CHECK(fs::exists(dir / d / "metrics.json"));
  auto table = slurp(dir / "compare.csv");
  CHECK(table.find("makespan_s") != std::string::npos);

  auto c = run("compare " + (dir / "design-1").string() + " " + (dir / "design-2a" / "metrics.json").string() +
               " --out " + (dir / "cmp").string());
  REQUIRE(c.code == 0);
  std::istringstream rows(slurp(dir / "cmp" / "compare.csv"));
  int lines = 0;
  for (std::string line; std::getline(rows, line);) ++lines;
  CHECK(lines == 3);
  fs::remove_all(dir);
}

TEST_CASE("infeasible worker demand exits nonzero with a diagnostic") {
  auto dir = scratch("infeasible");
  auto doc = nlohmann::json::parse(slurp(fs::path(WFSIM_SOURCE_DIR) / "fixtures" / "uc1-desk.json"));
  doc["workers"] = {{"T1", 5}, {"T2", 2}};
  std::ofstream(dir / "bad.json") << doc.dump();
  auto r = run("run --config " + (dir / "bad.json").string() + " --design 1 --out " + (dir / "out").string());
  CHECK(r.code != 0);
  CHECK(r.output.find("infeasible plan") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("generate writes the dataset") {
  auto dir = scratch("gen");
  auto r = run("generate --config uc1-desk --seed 4 --out " + dir.string());
  REQUIRE(r.code == 0);
  auto ds = nlohmann::json::parse(slurp(dir / "dataset.json"));
  CHECK(ds.at("items").size() == 60);
  fs::remove_all(dir);
}

TEST_CASE("fit recovers the profile from a run's event log") {
  auto dir = scratch("fit");
  REQUIRE(run("run --config uc1-desk --design 1 --seed 2 --out " + (dir / "run").string()).code == 0);
  auto r = run("fit --events " + (dir / "run" / "events.csv").string() + " --stage T1 --design 1 --all-bins --out " +
               (dir / "fit").string());
  REQUIRE(r.code == 0);
  auto fit = nlohmann::json::parse(slurp(dir / "fit" / "fit.json"));
  CHECK(fit.at("task") == "T1");
  CHECK(fit.at("alpha").get<double>() == doctest::Approx(1.92e-2).epsilon(0.5));
  CHECK(fit.at("beta").get<double>() == doctest::Approx(60.49).epsilon(0.25));
  fs::remove_all(dir);
}

TEST_CASE("local backend through the CLI") {
  auto dir = scratch("local");
  nlohmann::json doc = {
      {"workload", {{"label", "UC1"}, {"items", {{{"id", 0}, {"size_mb", 10.0}}, {{"id", 1}, {"size_mb", 20.0}}}}}},
      {"cluster", {{"n_nodes", 1}, {"cpus_per_node", 4}, {"gpus_per_node", 2}, {"mem_per_node_mb", 128000.0}}},
      {"profile",
       {{{"design", "2"}, {"use_case", "UC1"}, {"stage", "T1"}, {"alpha", 0.0}, {"beta", 0.05}},
        {{"design", "2"}, {"use_case", "UC1"}, {"stage", "T2"}, {"alpha", 0.0}, {"beta", 0.05}}}},
      {"noise_sigma", 0.0},
      {"wait_interval_s", 0.01},
      {"design", "2"},
      {"backend", "local"}};
  std::ofstream(dir / "local.json") << doc.dump();
  auto r = run("run --config " + (dir / "local.json").string() + " --mock-task " + WFSIM_MOCK_TASK + " --out " +
               (dir / "out").string());
  CHECK(r.code == 0);
  if (r.code != 0) MESSAGE(r.output);
  auto m = nlohmann::json::parse(slurp(dir / "out" / "metrics.json"));
  CHECK(m.at("valid").get<bool>());
  fs::remove_all(dir);
}

TEST_CASE("bad arguments are rejected") {
  CHECK(run("run --config uc1-desk --design 3").code != 0);
  CHECK(run("run --config /nonexistent.json").code != 0);
}
