#pragma once

// Small hand-built and random instances shared by the test binaries.

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "rmsn/model.hpp"
#include "rmsn/rng.hpp"

namespace rmsn::test {

struct TinyOptions {
  int min_nodes = 3;
  int max_nodes = 8;
  int max_service_arcs = 20;
  int max_clients = 1;
  int max_route_arcs = 3;
};

inline void add_service(ServiceNetwork& net, Mode mode, const std::vector<NodeId>& route, Rng& rng) {
  Service s;
  s.id = static_cast<ServiceId>(net.services.size());
  s.mode = mode;
  s.route = route;
  for (std::size_t i = 0; i + 1 < route.size(); ++i) {
    const bool known = std::any_of(net.arcs.begin(), net.arcs.end(),
                                   [&](const Arc& a) { return a.from == route[i] && a.to == route[i + 1]; });
    if (!known) net.arcs.push_back({route[i], route[i + 1], 100.0});
    net.service_arcs.push_back({s.id, route[i], route[i + 1], rng.uniform(0.5, 6.0), 0.0, rng.uniform(1.0, 40.0)});
  }
  net.services.push_back(std::move(s));
}

inline std::set<NodeId> reachable(const ServiceNetwork& net) {
  std::set<NodeId> seen{net.origin};
  bool grew = true;
  while (grew) {
    grew = false;
    for (const auto& a : net.service_arcs)
      if (seen.count(a.from) && seen.insert(a.to).second) grew = true;
  }
  return seen;
}

/// Random valid instance; deviations follow a random uncertain set and rate,
/// the budget is left for the caller to set.
inline Instance random_tiny_instance(std::uint64_t seed, const TinyOptions& opt = {}) {
  for (std::uint64_t attempt = 0;; ++attempt) {
    Rng rng(seed, "tiny", attempt);
    Instance inst;
    auto& net = inst.network;
    const int n = static_cast<int>(rng.integer(opt.min_nodes, opt.max_nodes));
    for (int i = 0; i < n; ++i) net.nodes.push_back(i);
    net.origin = 0;
    const auto target = static_cast<std::size_t>(rng.integer(n - 1, opt.max_service_arcs));
    while (net.service_arcs.size() < target) {
      const std::size_t room = target - net.service_arcs.size();
      const auto length = std::min<std::size_t>(static_cast<std::size_t>(rng.integer(1, opt.max_route_arcs)), room);
      std::vector<NodeId> route{rng.unit() < 0.4 ? net.origin : static_cast<NodeId>(rng.index(net.nodes.size()))};
      while (route.size() < length + 1) {
        std::vector<NodeId> options;
        for (NodeId v : net.nodes)
          if (std::find(route.begin(), route.end(), v) == route.end()) options.push_back(v);
        if (options.empty()) break;
        route.push_back(options[rng.index(options.size())]);
      }
      add_service(net, static_cast<Mode>(rng.integer(0, 2)), route, rng);
    }

    auto& costs = inst.costs;
    costs.product_value = 100.0;
    costs.degradation_rate_per_day = rng.unit() < 0.25 ? 0.2 : 0.1;
    costs.early_penalty_per_day = 15.0;
    costs.late_penalty_per_day = 20.0;
    costs.shelf_life = rng.uniform(8.0, 30.0);
    costs.default_transshipment_cost = 5.0;
    for (const auto& a : net.service_arcs)
      for (const auto& b : net.service_arcs)
        if (a.to == b.from && a.service != b.service && rng.unit() < 0.7)
          costs.transshipment_cost[{a.to, a.service, b.service}] = rng.uniform(0.0, 20.0);

    DisruptionProfile& d = inst.disruption;
    for (ArcIndex k = 0; k < net.service_arcs.size(); ++k)
      if (rng.unit() < 0.6) d.uncertain_arcs.push_back(k);
    d.deviation_rate = rng.uniform(0.0, 1.0);
    d.budget = 1.0;
    net = with_disruption(net, d);

    // Clients on destinations reachable within the shelf life.
    const ValidationReport probe = validate_network(net, {}, costs);
    if (!probe.ok()) continue;
    std::vector<NodeId> candidates;
    for (NodeId v : reachable(net)) {
      if (v == net.origin) continue;
      ClientOrder c{0, v, 1.0, 1.0};
      if (validate_network(net, {c}, costs).ok()) candidates.push_back(v);
    }
    if (candidates.empty()) continue;
    rng.shuffle(candidates);
    const auto clients = std::min<std::size_t>(static_cast<std::size_t>(rng.integer(1, opt.max_clients)), candidates.size());
    for (std::size_t i = 0; i < clients; ++i) {
      ClientOrder c;
      c.id = static_cast<ClientId>(i);
      c.destination = candidates[i];
      c.quantity = static_cast<double>(rng.integer(1, 10));
      c.due_date = rng.uniform(1.0, costs.shelf_life);
      inst.clients.push_back(c);
    }
    if (validate_instance(inst).ok()) return inst;
  }
}

/// o=0 -> m=1 -> d=2 with one service per leg, plus optional extras by the caller.
inline Instance two_leg_instance() {
  Instance inst;
  auto& net = inst.network;
  net.nodes = {0, 1, 2};
  net.origin = 0;
  net.arcs = {{0, 1, 500.0}, {1, 2, 500.0}};
  net.services = {{0, Mode::rail, {0, 1}}, {1, Mode::water, {1, 2}}};
  net.service_arcs = {{0, 0, 1, 4.0, 0.0, 30.0}, {1, 1, 2, 6.0, 0.0, 20.0}};
  inst.costs.transshipment_cost[{1, 0, 1}] = 12.0;
  inst.clients = {{0, 2, 3.0, 12.0}};
  inst.disruption.budget = 0.0;
  return inst;
}

}  // namespace rmsn::test
