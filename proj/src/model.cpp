#include "rmsn/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <functional>
#include <limits>
#include <queue>
#include <set>
#include <sstream>
#include <utility>

namespace rmsn {

namespace {

std::string fmt(const char* pattern, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

std::string arc_label(const ServiceArc& a, ArcIndex k) {
  return fmt("service-arc %zu (s%d, %d -> %d)", k, a.service, a.from, a.to);
}

}  // namespace

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::air: return "air";
    case Mode::rail: return "rail";
    case Mode::water: return "water";
  }
  return "rail";
}

Mode parse_mode(std::string_view text) {
  if (text == "air") return Mode::air;
  if (text == "rail") return Mode::rail;
  if (text == "water") return Mode::water;
  throw InvalidInput("unknown transport mode '" + std::string(text) + "'");
}

const Service* ServiceNetwork::find_service(ServiceId id) const {
  for (const auto& s : services)
    if (s.id == id) return &s;
  return nullptr;
}

bool ServiceNetwork::has_node(NodeId id) const {
  return std::find(nodes.begin(), nodes.end(), id) != nodes.end();
}

double CostParams::transfer_cost(NodeId node, ServiceId from_service, ServiceId to_service) const {
  if (from_service == to_service) return 0.0;
  auto it = transshipment_cost.find(TransferKey{node, from_service, to_service});
  return it == transshipment_cost.end() ? default_transshipment_cost : it->second;
}

ServiceNetwork with_disruption(const ServiceNetwork& net, const DisruptionProfile& profile) {
  if (!profile.deviation_rate) return net;
  ServiceNetwork out = net;
  for (auto& a : out.service_arcs) a.max_deviation = 0.0;
  for (ArcIndex k : profile.uncertain_arcs) {
    if (k >= out.service_arcs.size())
      throw InvalidInput(fmt("uncertain arc index %zu out of range", k));
    out.service_arcs[k].max_deviation = *profile.deviation_rate * out.service_arcs[k].nominal_time;
  }
  return out;
}

// ---------------------------------------------------------------------------

bool ValidationReport::has(std::string_view code) const {
  return std::any_of(findings.begin(), findings.end(), [&](const Finding& f) { return f.code == code; });
}

std::string ValidationReport::summary() const {
  std::ostringstream out;
  for (const auto& f : findings) out << f.code << ": " << f.message << '\n';
  return out.str();
}

ValidationReport validate_network(const ServiceNetwork& net, const std::vector<ClientOrder>& orders,
                                  const CostParams& costs) {
  ValidationReport report;
  auto add = [&](std::string code, std::string message) {
    report.findings.push_back({std::move(code), std::move(message)});
  };

  std::set<NodeId> nodes;
  for (NodeId n : net.nodes)
    if (!nodes.insert(n).second) add("duplicate-node", fmt("node %d listed twice", n));
  if (!nodes.count(net.origin)) add("missing-origin", fmt("origin %d is not a node", net.origin));

  std::set<std::pair<NodeId, NodeId>> arcs;
  for (const auto& a : net.arcs) {
    if (!nodes.count(a.from) || !nodes.count(a.to))
      add("dangling-arc", fmt("arc %d -> %d references an unknown node", a.from, a.to));
    if (a.from == a.to) add("self-loop", fmt("arc %d -> %d is a self-loop", a.from, a.to));
    if (!arcs.insert({a.from, a.to}).second) add("duplicate-arc", fmt("arc %d -> %d listed twice", a.from, a.to));
  }

  std::set<ServiceId> service_ids;
  for (const auto& s : net.services) {
    if (!service_ids.insert(s.id).second) add("duplicate-service", fmt("service %d listed twice", s.id));
    if (s.route.size() < 2) add("short-route", fmt("service %d route has fewer than 2 nodes", s.id));
    std::set<NodeId> seen;
    for (NodeId n : s.route)
      if (!seen.insert(n).second) add("repeated-route-node", fmt("service %d visits node %d twice", s.id, n));
    for (std::size_t i = 0; i + 1 < s.route.size(); ++i)
      if (!arcs.count({s.route[i], s.route[i + 1]}))
        add("route-off-network", fmt("service %d uses %d -> %d which is not an arc", s.id, s.route[i], s.route[i + 1]));
  }

  // Service-arcs must be exactly the consecutive pairs of each route.
  std::set<std::tuple<ServiceId, NodeId, NodeId>> listed;
  for (ArcIndex k = 0; k < net.service_arcs.size(); ++k) {
    const auto& a = net.service_arcs[k];
    if (!nodes.count(a.from) || !nodes.count(a.to))
      add("dangling-service-arc", arc_label(a, k) + " references an unknown node");
    else if (!arcs.count({a.from, a.to}))
      add("dangling-service-arc", arc_label(a, k) + " does not lie on a listed arc");
    if (!service_ids.count(a.service)) add("dangling-service-arc", arc_label(a, k) + " references an unknown service");
    if (!listed.insert({a.service, a.from, a.to}).second) add("duplicate-service-arc", arc_label(a, k) + " listed twice");
    if (!(a.nominal_time > 0.0)) add("bad-nominal-time", arc_label(a, k) + " has non-positive nominal time");
    if (!(a.max_deviation >= 0.0)) add("bad-deviation", arc_label(a, k) + " has negative max deviation");
    if (!(a.unit_cost >= 0.0)) add("bad-unit-cost", arc_label(a, k) + " has negative unit cost");
  }
  for (const auto& s : net.services) {
    for (std::size_t i = 0; i + 1 < s.route.size(); ++i)
      if (!listed.count({s.id, s.route[i], s.route[i + 1]}))
        add("missing-service-arc", fmt("service %d has no service-arc for %d -> %d", s.id, s.route[i], s.route[i + 1]));
  }
  for (const auto& [sid, from, to] : listed) {
    const Service* s = net.find_service(sid);
    if (!s) continue;
    bool on_route = false;
    for (std::size_t i = 0; i + 1 < s->route.size(); ++i)
      on_route = on_route || (s->route[i] == from && s->route[i + 1] == to);
    if (!on_route) add("service-arc-off-route", fmt("service-arc (s%d, %d -> %d) is not on the route of service %d", sid, from, to, sid));
  }

  if (!(costs.product_value >= 0.0)) add("bad-cost", "product value is negative");
  if (!(costs.degradation_rate_per_day >= 0.0)) add("bad-cost", "degradation rate is negative");
  if (!(costs.early_penalty_per_day >= 0.0)) add("bad-cost", "early penalty is negative");
  if (!(costs.late_penalty_per_day >= 0.0)) add("bad-cost", "late penalty is negative");
  if (!(costs.shelf_life > 0.0)) add("bad-shelf-life", "shelf life must be positive");
  if (!(costs.default_transshipment_cost >= 0.0)) add("bad-cost", "default transshipment cost is negative");
  for (const auto& [key, value] : costs.transshipment_cost) {
    if (!(value >= 0.0))
      add("bad-cost", fmt("transshipment cost at node %d (s%d -> s%d) is negative", key.node, key.from_service, key.to_service));
    if (key.from_service == key.to_service && value != 0.0)
      add("bad-cost", fmt("transshipment cost at node %d for staying on service %d must be zero", key.node, key.from_service));
  }

  // Reachability and nominal earliest arrival over well-formed service-arcs.
  std::map<NodeId, std::vector<const ServiceArc*>> out;
  for (const auto& a : net.service_arcs)
    if (nodes.count(a.from) && nodes.count(a.to) && a.nominal_time > 0.0) out[a.from].push_back(&a);
  std::map<NodeId, double> earliest;
  if (nodes.count(net.origin)) {
    using Item = std::pair<double, NodeId>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
    earliest[net.origin] = 0.0;
    queue.push({0.0, net.origin});
    while (!queue.empty()) {
      auto [t, n] = queue.top();
      queue.pop();
      if (t > earliest[n]) continue;
      for (const ServiceArc* a : out[n]) {
        double cand = t + a->nominal_time;
        auto it = earliest.find(a->to);
        if (it == earliest.end() || cand < it->second) {
          earliest[a->to] = cand;
          queue.push({cand, a->to});
        }
      }
    }
  }

  std::set<ClientId> client_ids;
  for (const auto& c : orders) {
    if (!client_ids.insert(c.id).second) add("duplicate-client", fmt("client %d listed twice", c.id));
    if (!nodes.count(c.destination)) {
      add("unknown-destination", fmt("client %d destination %d is not a node", c.id, c.destination));
      continue;
    }
    if (c.destination == net.origin) add("destination-is-origin", fmt("client %d destination equals the origin", c.id));
    if (!(c.quantity > 0.0)) add("bad-quantity", fmt("client %d quantity must be positive", c.id));
    if (!(c.due_date > 0.0) || c.due_date > costs.shelf_life + kTolerance)
      add("bad-due-date", fmt("client %d due date %.6g outside (0, shelf life]", c.id, c.due_date));
    auto it = earliest.find(c.destination);
    if (c.destination != net.origin) {
      if (it == earliest.end())
        add("unreachable-destination", fmt("client %d destination %d has no service path from the origin", c.id, c.destination));
      else if (it->second > costs.shelf_life + kTolerance)
        add("unreachable-destination",
            fmt("client %d destination %d cannot be reached within the shelf life (fastest %.6g days)", c.id, c.destination, it->second));
    }
  }
  return report;
}

ValidationReport validate_instance(const Instance& instance) {
  ValidationReport report = validate_network(instance.network, instance.clients, instance.costs);
  const auto& d = instance.disruption;
  const auto& arcs = instance.network.service_arcs;
  auto add = [&](std::string code, std::string message) {
    report.findings.push_back({std::move(code), std::move(message)});
  };
  if (!(d.budget >= 0.0)) add("bad-budget", "budget must be non-negative");
  std::set<ArcIndex> uncertain;
  for (ArcIndex k : d.uncertain_arcs) {
    if (k >= arcs.size()) add("bad-uncertain-arc", fmt("uncertain arc index %zu out of range", k));
    else if (!uncertain.insert(k).second) add("bad-uncertain-arc", fmt("uncertain arc index %zu listed twice", k));
  }
  if (d.deviation_rate) {
    double rate = *d.deviation_rate;
    if (!(rate >= 0.0)) add("bad-deviation-rate", "deviation rate must be non-negative");
    for (ArcIndex k = 0; k < arcs.size(); ++k) {
      double expected = uncertain.count(k) ? rate * arcs[k].nominal_time : 0.0;
      if (std::abs(arcs[k].max_deviation - expected) > 1e-9 * std::max(1.0, expected))
        add("deviation-mismatch", arc_label(arcs[k], k) + fmt(" has max deviation %.9g, disruption implies %.9g",
                                                                 arcs[k].max_deviation, expected));
    }
  }
  return report;
}

// ---------------------------------------------------------------------------

ExpandedGraph::ExpandedGraph(const ServiceNetwork& net, const CostParams& costs) {
  auto intern = [&](NodeId id) {
    auto [it, inserted] = dense_.emplace(id, node_ids_.size());
    if (inserted) node_ids_.push_back(id);
    return it->second;
  };
  for (NodeId n : net.nodes) intern(n);
  origin_ = intern(net.origin);

  const std::size_t m = net.service_arcs.size();
  tail_.resize(m);
  head_.resize(m);
  for (ArcIndex k = 0; k < m; ++k) {
    tail_[k] = intern(net.service_arcs[k].from);
    head_[k] = intern(net.service_arcs[k].to);
  }
  into_.assign(node_ids_.size(), {});
  out_of_.assign(node_ids_.size(), {});
  for (ArcIndex k = 0; k < m; ++k) {
    into_[head_[k]].push_back(k);
    out_of_[tail_[k]].push_back(k);
  }
  source_arcs_ = out_of_[origin_];

  successors_.assign(m, {});
  for (ArcIndex a = 0; a < m; ++a) {
    const auto& in = net.service_arcs[a];
    for (ArcIndex b : out_of_[head_[a]]) {
      const auto& next = net.service_arcs[b];
      successors_[a].push_back({b, costs.transfer_cost(in.to, in.service, next.service)});
    }
  }
}

std::size_t ExpandedGraph::dense(NodeId id) const {
  auto it = dense_.find(id);
  if (it == dense_.end()) throw InvalidInput(fmt("node %d is not in the network", id));
  return it->second;
}

double ExpandedGraph::transfer_cost(const Path& path) const {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const auto& edges = successors_.at(path[i]);
    auto it = std::lower_bound(edges.begin(), edges.end(), path[i + 1],
                               [](const Edge& e, ArcIndex k) { return e.to < k; });
    if (it == edges.end() || it->to != path[i + 1])
      throw InvalidInput(fmt("service-arcs %zu and %zu are not consecutive", path[i], path[i + 1]));
    total += it->transfer_cost;
  }
  return total;
}

std::vector<Path> ExpandedGraph::enumerate_paths(NodeId destination) const {
  std::vector<Path> paths;
  const std::size_t target = dense(destination);
  if (target == origin_) return paths;
  std::vector<char> visited(node_ids_.size(), 0);
  Path current;
  visited[origin_] = 1;
  std::function<void(ArcIndex)> extend = [&](ArcIndex arc) {
    std::size_t node = head_[arc];
    if (visited[node]) return;
    current.push_back(arc);
    if (node == target) {
      paths.push_back(current);
    } else {
      visited[node] = 1;
      for (const Edge& e : successors_[arc]) extend(e.to);
      visited[node] = 0;
    }
    current.pop_back();
  };
  for (ArcIndex arc : source_arcs_) extend(arc);
  return paths;
}

ExpandedGraph build_search_graph(const ServiceNetwork& net, const CostParams& costs) {
  return ExpandedGraph(net, costs);
}

std::string describe_path_defect(const ServiceNetwork& net, const Path& path, NodeId destination) {
  if (path.empty()) return "empty itinerary";
  std::set<NodeId> seen{net.origin};
  NodeId at = net.origin;
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (path[i] >= net.service_arcs.size()) return fmt("service-arc index %zu out of range", path[i]);
    const auto& a = net.service_arcs[path[i]];
    if (a.from != at) return fmt("service-arc %zu starts at %d, expected %d", path[i], a.from, at);
    if (!seen.insert(a.to).second) return fmt("node %d visited twice", a.to);
    at = a.to;
  }
  if (at != destination) return fmt("itinerary ends at %d, expected destination %d", at, destination);
  return {};
}

}  // namespace rmsn
