#include <doctest.h>

#include <filesystem>

#include "support.hpp"
#include "wfsim/designs.hpp"
#include "wfsim/engine.hpp"
#include "wfsim/metrics.hpp"

using namespace wfsim;
using namespace wfsim::testing;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("wfsim-test-" + name + "-" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

ModelTable tiny_models() {
  std::vector<ProfileRow> rows;
  for (Design d : {Design::D1, Design::D2, Design::D2A})
    for (Stage s : {Stage::T1, Stage::T2}) rows.push_back({d, UseCase::UC1, s, 0.0, 0.05});
  return ModelTable(rows, 0.0, 0.01);
}

ClusterSpec small_cluster(int nodes) { return {nodes, 4, 2, 128000.0, {}}; }

}  // namespace

TEST_CASE("design 2 on one logical node produces every token and a complete log") {
  auto dir = scratch("d2");
  auto models = tiny_models();
  auto w = workload_of({100.0, 200.0, 300.0, 400.0});
  auto plan = plan_design2(w, small_cluster(1));
  ProtocolConfig proto;
  proto.wait_interval_s = 0.01;
  auto log = execute_local(plan, models, zero_overheads(), proto, 1, dir, {WFSIM_MOCK_TASK, 1.0});
  CHECK(log.clock_kind == ClockKind::Wall);
  CHECK(log.records.size() == 8);
  for (ItemId i = 0; i < 4; ++i) {
    CHECK(fs::exists(dir / "node-0" / ("item-" + std::to_string(i) + ".t1")));
    CHECK(fs::exists(dir / "node-0" / ("item-" + std::to_string(i) + ".t2")));
  }
  auto report = validate_log(log, plan);
  CHECK(report.ok());
  if (!report.ok()) MESSAGE(report.violations.front());
  fs::remove_all(dir);
}

TEST_CASE("every design runs locally on two nodes") {
  auto models = tiny_models();
  auto w = workload_of({100.0, 200.0, 300.0, 400.0, 500.0, 600.0});
  for (Design d : {Design::D1, Design::D2, Design::D2A}) {
    auto dir = scratch(std::string("all-") + std::string(to_string(d)));
    auto plan = make_plan(d, w, small_cluster(2), models);
    OverheadConfig o;
    o.scheduler_latency_s = 0.01;
    ProtocolConfig proto;
    proto.wait_interval_s = 0.01;
    auto log = execute_local(plan, models, o, proto, 3, dir, {WFSIM_MOCK_TASK, 1.0});
    CAPTURE(to_string(d));
    auto report = validate_log(log, plan);
    CHECK(report.ok());
    if (!report.ok()) MESSAGE(report.violations.front());
    for (const auto& r : log.records)
      CHECK(fs::exists(dir / ("node-" + std::to_string(r.node_id)) /
                       ("item-" + std::to_string(r.item_id) + (r.stage == Stage::T1 ? ".t1" : ".t2"))));
    if (d == Design::D2A) {
      CHECK(fs::exists(dir / "node-0" / "input.json"));
      CHECK(overhead_report(log).contains("distribute"));
    }
    fs::remove_all(dir);
  }
}

TEST_CASE("zero-sleep mock tasks isolate spawn cost") {
  auto dir = scratch("spawn");
  double cost = measure_spawn_cost(WFSIM_MOCK_TASK, dir, 5);
  CHECK(cost > 0.0);
  CHECK(cost < 0.5);

  std::vector<ProfileRow> rows = {{Design::D2, UseCase::UC1, Stage::T1, 0.0, 0.0},
                                  {Design::D2, UseCase::UC1, Stage::T2, 0.0, 0.0}};
  ModelTable models(rows, 0.0, 1e-6);
  auto plan = plan_design2(workload_of({1.0, 2.0, 3.0}), small_cluster(1));
  auto log = execute_local(plan, models, zero_overheads(), {0.01, {}}, 1, dir / "run",
                           {WFSIM_MOCK_TASK, 1.0});
  auto rep = overhead_report(log);
  for (const auto& r : log.records) CHECK(r.duration() < 0.5);
  CHECK(rep.contains("bootstrap"));
  CHECK(rep.contains("teardown"));
  fs::remove_all(dir);
}

TEST_CASE("a missing executable aborts with a partial log") {
  auto dir = scratch("missing");
  auto plan = plan_design1(workload_of({1.0, 2.0}), small_cluster(1));
  CHECK_THROWS_AS(execute_local(plan, tiny_models(), zero_overheads(), {}, 1, dir,
                                {dir / "no-such-binary", 1.0}),
                  ExecutionError);
  fs::remove_all(dir);
}
