#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "support.hpp"
#include "wfsim/designs.hpp"
#include "wfsim/errors.hpp"
#include "wfsim/metrics.hpp"

using namespace wfsim;
using namespace wfsim::testing;

namespace {

int peak_concurrency(const EventLog& log, Stage stage) {
  std::vector<std::pair<double, int>> ev;
  for (const auto& r : log.records)
    if (r.stage == stage) {
      ev.emplace_back(r.t_start, +1);
      ev.emplace_back(r.t_end, -1);
    }
  std::sort(ev.begin(), ev.end());
  int cur = 0, peak = 0;
  for (auto [t, d] : ev) peak = std::max(peak, cur += d);
  return peak;
}

// Oracle: exhaustive search over all assignments of items to nodes.
double optimal_makespan(const std::vector<double>& w, int nodes) {
  std::size_t n = w.size();
  std::vector<int> assign(n, 0);
  double best = 1e300;
  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i) total *= static_cast<std::size_t>(nodes);
  for (std::size_t code = 0; code < total; ++code) {
    std::vector<double> load(nodes, 0.0);
    std::size_t c = code;
    for (std::size_t i = 0; i < n; ++i) {
      load[c % nodes] += w[i];
      c /= nodes;
    }
    best = std::min(best, *std::max_element(load.begin(), load.end()));
  }
  return best;
}

std::vector<double> totals(const std::vector<std::vector<DataItem>>& parts) {
  std::vector<double> t;
  for (const auto& p : parts) {
    double s = 0.0;
    for (const auto& i : p) s += i.size_mb;
    t.push_back(s);
  }
  return t;
}

}  // namespace

TEST_CASE("worker counts are derived from node resources") {
  auto plan = plan_design1(workload_of({100.0}), uc1_cluster());
  CHECK(plan.workers(0, Stage::T1) == 3);
  CHECK(plan.workers(0, Stage::T2) == 2);

  ClusterSpec uc2{4, 32, 2, 128000.0, {}};
  auto plan2 = plan_design2(workload_of({3.0}, UseCase::UC2), uc2);
  CHECK(plan2.workers(3, Stage::T1) == 2);
  CHECK(plan2.workers(3, Stage::T2) == 2);
}

TEST_CASE("queue topologies") {
  auto w = workload_of({100.0, 200.0});
  auto p2 = plan_design2(w, uc1_cluster());
  CHECK(p2.queues.global_input);
  CHECK(p2.queues.node_output_queues == 4);
  auto p2a = plan_design2a(w, uc1_cluster(), {1.0, 0.0, 0.0});
  CHECK_FALSE(p2a.queues.global_input);
  CHECK(p2a.queues.node_input_queues == 4);
  CHECK(p2a.queues.node_output_queues == 4);
  REQUIRE(p2a.per_node_input);
  CHECK(p2a.per_node_input->size() == 4);
}

TEST_CASE("infeasible worker demand is a planning error") {
  auto w = workload_of({100.0});
  CHECK_THROWS_AS(plan_design1(w, uc1_cluster(), {4, 2}), PlanningError);
  CHECK_THROWS_AS(plan_design2(w, uc1_cluster(), {0, 2}), PlanningError);
  try {
    plan_design2a(w, uc1_cluster(), {1.0, 0.0, 0.0}, {3, 3});
    FAIL("expected PlanningError");
  } catch (const PlanningError& e) {
    CHECK(std::string(e.what()).find("infeasible plan") != std::string::npos);
  }
}

TEST_CASE("tagged placement") {
  auto cluster = uc1_cluster();
  auto nodes = idle_nodes(cluster);
  auto t1 = uc1_pipeline()[0];
  auto t2 = uc1_pipeline()[1];
  std::map<ItemId, NodeId> tags;
  SUBCASE("T1 goes to the lowest free node") {
    CHECK(tagged_place(0, Stage::T1, nodes, t1, tags) == 0);
    for (int i = 0; i < 3; ++i) nodes[0] = allocate(nodes[0], i, t1);
    CHECK(tagged_place(1, Stage::T1, nodes, t1, tags) == 1);
  }
  SUBCASE("T2 follows its tag even when node 0 is idle") {
    tags[5] = 2;
    CHECK(tagged_place(5, Stage::T2, nodes, t2, tags) == 2);
    nodes[2] = allocate(nodes[2], 10, t2);
    nodes[2] = allocate(nodes[2], 11, t2);
    CHECK_FALSE(tagged_place(5, Stage::T2, nodes, t2, tags).has_value());
  }
  SUBCASE("untagged T2 is an error") {
    CHECK_THROWS_AS(tagged_place(9, Stage::T2, nodes, t2, tags), PlanningError);
  }
}

TEST_CASE("design 1 schedule: 6 items on 2 nodes") {
  auto w = workload_of({1000, 1000, 1000, 1000, 1000, 1000});
  auto plan = plan_design1(w, uc1_cluster(2));
  auto log = simulate(plan, noiseless_table(), zero_overheads(), {}, 1);
  CHECK(log.records.size() == 12);
  CHECK(peak_concurrency(log, Stage::T1) == 6);
  CHECK(peak_concurrency(log, Stage::T2) <= 4);
  for (const auto& r : log.records)
    if (r.stage == Stage::T1) CHECK(r.node_id == (r.item_id < 3 ? 0 : 1));
  CHECK(validate_log(log, plan).ok());
}

TEST_CASE("design 1 with one item on one node runs both stages on node 0") {
  auto plan = plan_design1(workload_of({500.0}), uc1_cluster(1));
  auto log = simulate(plan, noiseless_table(), zero_overheads(), {}, 3);
  REQUIRE(log.records.size() == 2);
  for (const auto& r : log.records) CHECK(r.node_id == 0);
  CHECK(log.records[0].t_end <= log.records[1].t_start);
}

TEST_CASE("design 2 with zero items terminates every worker via Empty") {
  auto plan = plan_design2(workload_of({}), uc1_cluster());
  SimStats stats;
  auto log = simulate(plan, noiseless_table(), zero_overheads(), {}, 1, &stats);
  CHECK(log.records.empty());
  CHECK(stats.data_pulls == 0);
  CHECK(stats.empty_pulls == 4 * (3 + 2));
}

TEST_CASE("design 2 late binding shifts work away from a slow node") {
  std::vector<double> sizes(200, 1304.85);
  auto cluster = uc1_cluster(2);
  cluster.slowdown = {1.0, 2.0};
  ModelTable models(fitted_profile_rows(), 0.0);
  auto plan = plan_design2(workload_of(sizes), cluster);
  auto log = simulate(plan, models, zero_overheads(), {}, 5);
  auto per = per_node_totals(log, 2);
  double ratio = static_cast<double>(per[0].items_processed) / per[1].items_processed;
  CHECK(ratio == doctest::Approx(2.0).epsilon(0.10));
  CHECK(validate_log(log, plan).ok());
}

TEST_CASE("design 2.A with one item leaves other nodes idle") {
  auto models = noiseless_table();
  auto plan = make_plan(Design::D2A, workload_of({800.0}), uc1_cluster(), models);
  auto log = simulate(plan, models, zero_overheads(), {}, 1);
  REQUIRE(log.records.size() == 2);
  CHECK(log.records[0].node_id == log.records[1].node_id);
  CHECK(validate_log(log, plan).ok());
}

TEST_CASE("LPT partition examples") {
  std::vector<DataItem> items;
  for (int s = 8; s >= 1; --s) items.push_back({static_cast<ItemId>(8 - s), static_cast<double>(s)});
  PerfModel identity{1.0, 0.0, 0.0, 1e-9};
  auto parts = partition_early_binding(items, 4, identity);
  for (double t : totals(parts)) CHECK(t == doctest::Approx(9.0));
  CHECK(optimal_makespan({8, 7, 6, 5, 4, 3, 2, 1}, 4) == doctest::Approx(9.0));

  auto one = partition_early_binding(items, 1, identity);
  CHECK(one[0].size() == 8);

  std::vector<DataItem> same;
  for (ItemId i = 0; i < 12; ++i) same.push_back({i, 5.0});
  for (const auto& p : partition_early_binding(same, 4, identity)) CHECK(p.size() == 3);
}

TEST_CASE("LPT stays within 4/3 of the optimum (property)") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(1.0, 100.0);
  PerfModel identity{1.0, 0.0, 0.0, 1e-9};
  for (int trial = 0; trial < 60; ++trial) {
    int nodes = 2 + trial % 3;
    int n = 3 + trial % 6;
    std::vector<DataItem> items;
    std::vector<double> w;
    for (int i = 0; i < n; ++i) {
      w.push_back(u(rng));
      items.push_back({static_cast<ItemId>(i), w.back()});
    }
    auto parts = partition_early_binding(items, nodes, identity);
    auto t = totals(parts);
    double lpt = *std::max_element(t.begin(), t.end());
    double opt = optimal_makespan(w, nodes);
    CHECK(lpt <= opt * 4.0 / 3.0 + 1e-9);
    std::size_t count = 0;
    for (const auto& p : parts) count += p.size();
    CHECK(count == items.size());
  }
}

TEST_CASE("D2A predicted balance beats D2 realized balance on average over seeds") {
  auto models = ModelTable(fitted_profile_rows(), 0.15);
  auto t1 = models.lookup(Design::D2A, "UC1/T1");
  double cv_pred = 0.0, cv_d2 = 0.0;
  const int seeds = 20;
  for (int s = 0; s < seeds; ++s) {
    auto items = generate_dataset({60, 1304.85, 512.68, 50.0, 2770.0}, 100 + s);
    WorkloadSpec w = workload_of({});
    w.items = items;
    auto parts = partition_early_binding(items, 4, t1);
    std::vector<double> pred;
    for (const auto& p : parts) {
      double sum = 0.0;
      for (const auto& i : p) sum += predict_duration(t1, i.size_mb);
      pred.push_back(sum);
    }
    double mean = std::accumulate(pred.begin(), pred.end(), 0.0) / 4.0, var = 0.0;
    for (double x : pred) var += (x - mean) * (x - mean) / 4.0;
    cv_pred += std::sqrt(var) / mean;

    auto plan = plan_design2(w, uc1_cluster());
    auto log = simulate(plan, models, zero_overheads(), {}, static_cast<std::uint64_t>(s));
    std::vector<double> realized;
    for (const auto& nt : per_node_totals(log, 4)) realized.push_back(nt.t1_busy_s);
    mean = std::accumulate(realized.begin(), realized.end(), 0.0) / 4.0;
    var = 0.0;
    for (double x : realized) var += (x - mean) * (x - mean) / 4.0;
    cv_d2 += std::sqrt(var) / mean;
  }
  CHECK(cv_pred / seeds <= cv_d2 / seeds);
}
