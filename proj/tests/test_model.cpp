#include "doctest.h"
#include "support.hpp"

#include "rmsn/instance_io.hpp"
#include "rmsn/model.hpp"

using namespace rmsn;

namespace {

ServiceNetwork three_node_net() {
  ServiceNetwork net;
  net.nodes = {0, 1, 2};
  net.origin = 0;
  net.arcs = {{0, 1, 400.0}, {1, 2, 600.0}};
  net.services = {{0, Mode::rail, {0, 1, 2}}};
  net.service_arcs = {{0, 0, 1, 2.0, 0.0, 10.0}, {0, 1, 2, 3.0, 0.0, 12.0}};
  return net;
}

// Brute force over x vectors: every subset of service-arcs forming a simple
// origin-destination chain.
std::size_t count_chains(const ServiceNetwork& net, NodeId destination) {
  const std::size_t n = net.service_arcs.size();
  std::size_t count = 0;
  std::vector<ArcIndex> order;
  std::vector<bool> used(n, false);
  std::vector<NodeId> visited{net.origin};
  auto dfs = [&](auto&& self, NodeId at) -> void {
    if (at == destination) {
      ++count;
      return;
    }
    for (ArcIndex k = 0; k < n; ++k) {
      const auto& a = net.service_arcs[k];
      if (used[k] || a.from != at) continue;
      if (std::find(visited.begin(), visited.end(), a.to) != visited.end()) continue;
      used[k] = true;
      visited.push_back(a.to);
      self(self, a.to);
      visited.pop_back();
      used[k] = false;
    }
  };
  dfs(dfs, net.origin);
  return count;
}

}  // namespace

TEST_CASE("well-formed network validates clean") {
  const auto net = three_node_net();
  const auto report = validate_network(net, {{0, 2, 1.0, 5.0}}, CostParams{});
  CHECK(report.ok());
}

TEST_CASE("service-arc on an unknown node is reported") {
  auto net = three_node_net();
  net.service_arcs.push_back({0, 2, 7, 1.0, 0.0, 1.0});
  const auto report = validate_network(net, {}, CostParams{});
  CHECK_FALSE(report.ok());
  CHECK(report.has("dangling-service-arc"));
  CHECK(report.summary().find("7") != std::string::npos);
}

TEST_CASE("destination without incoming service-arc is unreachable") {
  auto net = three_node_net();
  net.nodes.push_back(3);
  const auto report = validate_network(net, {{0, 3, 1.0, 5.0}}, CostParams{});
  CHECK(report.has("unreachable-destination"));
}

TEST_CASE("destination beyond the shelf life is unreachable") {
  CostParams costs;
  costs.shelf_life = 4.0;
  const auto report = validate_network(three_node_net(), {{0, 2, 1.0, 4.0}}, costs);
  CHECK(report.has("unreachable-destination"));
}

TEST_CASE("instance validation checks the disruption profile") {
  auto inst = test::two_leg_instance();
  CHECK(validate_instance(inst).ok());
  inst.disruption.uncertain_arcs = {5};
  CHECK(validate_instance(inst).has("bad-uncertain-arc"));
  inst.disruption.uncertain_arcs = {};
  inst.disruption.budget = -1.0;
  CHECK(validate_instance(inst).has("bad-budget"));
}

TEST_CASE("with_disruption scales uncertain arcs only") {
  const auto net = three_node_net();
  DisruptionProfile p;
  p.uncertain_arcs = {1};
  p.deviation_rate = 0.5;
  const auto out = with_disruption(net, p);
  CHECK(out.service_arcs[0].max_deviation == 0.0);
  CHECK(out.service_arcs[1].max_deviation == doctest::Approx(1.5));
}

TEST_CASE("transfer cost is zero on the same service") {
  CostParams costs;
  costs.default_transshipment_cost = 9.0;
  costs.transshipment_cost[{1, 0, 1}] = 4.0;
  CHECK(costs.transfer_cost(1, 0, 0) == 0.0);
  CHECK(costs.transfer_cost(1, 0, 1) == 4.0);
  CHECK(costs.transfer_cost(1, 1, 0) == 9.0);
}

TEST_CASE("mode names round trip") {
  for (Mode m : {Mode::air, Mode::rail, Mode::water}) CHECK(parse_mode(to_string(m)) == m);
  CHECK_THROWS_AS(parse_mode("truck"), InvalidInput);
}

TEST_CASE("single direct service gives one path with no transfer") {
  ServiceNetwork net;
  net.nodes = {0, 1};
  net.arcs = {{0, 1, 100.0}};
  net.services = {{0, Mode::air, {0, 1}}};
  net.service_arcs = {{0, 0, 1, 1.0, 0.0, 5.0}};
  const auto g = build_search_graph(net, CostParams{});
  const auto paths = g.enumerate_paths(1);
  REQUIRE(paths.size() == 1);
  CHECK(paths[0] == Path{0});
  CHECK(g.transfer_cost(paths[0]) == 0.0);
}

TEST_CASE("two services meeting at a node carry the transfer cost") {
  const auto inst = test::two_leg_instance();
  const auto g = build_search_graph(inst.network, inst.costs);
  const auto paths = g.enumerate_paths(2);
  REQUIRE(paths.size() == 1);
  CHECK(paths[0] == Path{0, 1});
  CHECK(g.transfer_cost(paths[0]) == 12.0);
}

TEST_CASE("continuing on the same service costs nothing") {
  CostParams costs;
  costs.default_transshipment_cost = 50.0;
  const auto net = three_node_net();
  const auto g = build_search_graph(net, costs);
  const auto paths = g.enumerate_paths(2);
  REQUIRE(paths.size() == 1);
  CHECK(g.transfer_cost(paths[0]) == 0.0);
}

TEST_CASE("unlinked arcs are rejected by transfer_cost") {
  const auto net = three_node_net();
  const auto g = build_search_graph(net, CostParams{});
  CHECK_THROWS_AS(g.transfer_cost(Path{1, 0}), InvalidInput);
}

TEST_CASE("path defects are described") {
  const auto net = three_node_net();
  CHECK(describe_path_defect(net, {0, 1}, 2).empty());
  CHECK_FALSE(describe_path_defect(net, {1}, 2).empty());
  CHECK_FALSE(describe_path_defect(net, {0}, 2).empty());
  CHECK_FALSE(describe_path_defect(net, {}, 2).empty());
}

TEST_CASE("expanded graph paths match brute-force chains on random networks") {
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    const auto inst = test::random_tiny_instance(seed);
    const auto g = build_search_graph(inst.network, inst.costs);
    for (NodeId v : inst.network.nodes) {
      if (v == inst.network.origin) continue;
      const auto paths = g.enumerate_paths(v);
      CHECK(paths.size() == count_chains(inst.network, v));
      CHECK(std::is_sorted(paths.begin(), paths.end()));
      for (const auto& p : paths) CHECK(describe_path_defect(inst.network, p, v).empty());
    }
  }
}

TEST_CASE("instance JSON round trip is exact") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto inst = test::random_tiny_instance(seed);
    const std::string text = dump_json(to_json(inst));
    const Instance back = instance_from_json(parse_json(text, "memory"));
    CHECK(dump_json(to_json(back)) == text);
    CHECK(validate_instance(back).ok());
  }
}

TEST_CASE("malformed instance JSON is an input error") {
  CHECK_THROWS_AS(parse_json("{ nope", "memory"), InvalidInput);
  CHECK_THROWS_AS(instance_from_json(parse_json("{\"nodes\": 3}", "memory")), InvalidInput);
}
