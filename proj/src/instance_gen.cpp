#include "rmsn/instance_gen.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <queue>
#include <set>

#include "rmsn/rng.hpp"

namespace rmsn {

namespace {

constexpr std::array<Mode, 3> kModes{Mode::air, Mode::rail, Mode::water};

void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidInput("generator config: " + what);
}

void check_range(const Range& r, const std::string& name, bool positive) {
  require(std::isfinite(r.lo) && std::isfinite(r.hi) && r.lo <= r.hi, name + " must be a non-empty range");
  if (positive) require(r.lo > 0.0, name + " must be positive");
  else require(r.lo >= 0.0, name + " must be non-negative");
}

Json range_json(const Range& r) { return Json::array({r.lo, r.hi}); }

Range range_from(const Json& j, const std::string& name) {
  if (!j.is_array() || j.size() != 2) throw InvalidInput("generator config: " + name + " must be [lo, hi]");
  return {j[0].get<double>(), j[1].get<double>()};
}

// Fastest nominal time from the origin to every node, transfers ignored.
std::map<NodeId, double> fastest_times(const ServiceNetwork& net) {
  std::map<NodeId, double> dist;
  for (NodeId n : net.nodes) dist[n] = std::numeric_limits<double>::infinity();
  using Item = std::pair<double, NodeId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  dist[net.origin] = 0.0;
  queue.push({0.0, net.origin});
  while (!queue.empty()) {
    auto [d, node] = queue.top();
    queue.pop();
    if (d > dist[node]) continue;
    for (const auto& a : net.service_arcs) {
      if (a.from != node) continue;
      const double cand = d + a.nominal_time;
      if (cand < dist[a.to]) {
        dist[a.to] = cand;
        queue.push({cand, a.to});
      }
    }
  }
  return dist;
}

Mode pick_mode(Rng& rng, const GeneratorConfig& cfg) {
  double total = 0.0;
  for (const auto& m : cfg.modes) total += m.share;
  double x = rng.unit() * total;
  for (std::size_t i = 0; i < kModes.size(); ++i) {
    if (x < cfg.modes[i].share) return kModes[i];
    x -= cfg.modes[i].share;
  }
  for (std::size_t i = kModes.size(); i-- > 0;)
    if (cfg.modes[i].share > 0.0) return kModes[i];
  return Mode::rail;
}

class ServiceBuilder {
 public:
  ServiceBuilder(const BaseGraph& base, const GeneratorConfig& cfg) : base_(base), cfg_(cfg), out_(base.nodes.size()) {
    for (std::size_t k = 0; k < base.arcs.size(); ++k) {
      out_[static_cast<std::size_t>(base.arcs[k].from)].push_back(k);
    }
    net_.nodes = base.nodes;
    net_.arcs = base.arcs;
    net_.origin = base.origin;
  }

  // Routes along arcs not yet covered until every base arc carries a service.
  void cover_all(Rng& rng) {
    std::vector<bool> covered(base_.arcs.size(), false);
    std::vector<std::size_t> order(base_.arcs.size());
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);
    for (std::size_t start : order) {
      if (covered[start]) continue;
      auto route = grow_route(rng, start, base_.arcs.size(), [&](std::size_t k) { return !covered[k]; });
      for (auto k : route) covered[k] = true;
      add_service(rng, route);
    }
  }

  void fill_to(Rng& rng, std::size_t target) {
    while (net_.service_arcs.size() < target) {
      const std::size_t start = rng.index(base_.arcs.size());
      auto route = grow_route(rng, start, target - net_.service_arcs.size(), [](std::size_t) { return true; });
      add_service(rng, route);
    }
  }

  const ServiceNetwork& network() const { return net_; }

 private:
  std::vector<std::size_t> grow_route(Rng& rng, std::size_t start, std::size_t limit,
                                      const std::function<bool(std::size_t)>& usable) {
    const auto wanted = static_cast<std::size_t>(rng.integer(1, cfg_.max_route_arcs));
    const std::size_t length = std::min(wanted, limit);
    std::vector<std::size_t> route{start};
    std::set<NodeId> seen{base_.arcs[start].from, base_.arcs[start].to};
    while (route.size() < length) {
      std::vector<std::size_t> next;
      for (auto k : out_[static_cast<std::size_t>(base_.arcs[route.back()].to)])
        if (usable(k) && !seen.count(base_.arcs[k].to)) next.push_back(k);
      if (next.empty()) break;
      const std::size_t k = next[rng.index(next.size())];
      route.push_back(k);
      seen.insert(base_.arcs[k].to);
    }
    return route;
  }

  void add_service(Rng& rng, const std::vector<std::size_t>& route) {
    Service s;
    s.id = static_cast<ServiceId>(net_.services.size());
    s.mode = pick_mode(rng, cfg_);
    s.route.push_back(base_.arcs[route.front()].from);
    const auto& params = cfg_.modes[static_cast<std::size_t>(s.mode)];
    for (auto k : route) {
      const Arc& arc = base_.arcs[k];
      s.route.push_back(arc.to);
      Rng draw(cfg_.seed, "service-arc", net_.service_arcs.size());
      const double speed = draw.uniform(params.speed_kmh.lo, params.speed_kmh.hi);
      const double per_km = draw.uniform(params.cost_per_km.lo, params.cost_per_km.hi);
      net_.service_arcs.push_back(
          {s.id, arc.from, arc.to, arc.distance_km / speed / 24.0, 0.0, per_km * arc.distance_km / cfg_.cost_divisor});
    }
    net_.services.push_back(std::move(s));
  }

  const BaseGraph& base_;
  const GeneratorConfig& cfg_;
  std::vector<std::vector<std::size_t>> out_;
  ServiceNetwork net_;
};

}  // namespace

void validate_config(const GeneratorConfig& cfg) {
  require(cfg.n_nodes >= 2, "n_nodes must be at least 2");
  require(cfg.n_arcs >= cfg.n_nodes - 1, "n_arcs must be at least n_nodes - 1");
  require(static_cast<long long>(cfg.n_arcs) <= static_cast<long long>(cfg.n_nodes) * (cfg.n_nodes - 1),
          "n_arcs exceeds the number of ordered node pairs");
  require(!cfg.service_arc_targets.empty(), "service_arc_targets must not be empty");
  for (std::size_t i = 1; i < cfg.service_arc_targets.size(); ++i)
    require(cfg.service_arc_targets[i] > cfg.service_arc_targets[i - 1], "service_arc_targets must be strictly increasing");
  require(cfg.service_arc_targets.front() >= cfg.n_arcs,
          "the first service-arc target " + std::to_string(cfg.service_arc_targets.front()) +
              " cannot cover all " + std::to_string(cfg.n_arcs) + " arcs");
  require(cfg.n_clients >= 0 && cfg.n_clients <= cfg.n_nodes - 1, "n_clients must be between 0 and n_nodes - 1");
  check_range(cfg.distance_km, "distance_km", true);
  double share = 0.0;
  for (std::size_t i = 0; i < kModes.size(); ++i) {
    const std::string name(to_string(kModes[i]));
    require(cfg.modes[i].share >= 0.0, name + " share must be non-negative");
    share += cfg.modes[i].share;
    check_range(cfg.modes[i].speed_kmh, name + " speed_kmh", true);
    check_range(cfg.modes[i].cost_per_km, name + " cost_per_km", false);
  }
  require(share > 0.0, "mode shares must not all be zero");
  require(cfg.cost_divisor > 0.0, "cost_divisor must be positive");
  require(cfg.max_route_arcs >= 1, "max_route_arcs must be at least 1");
  check_range(cfg.transfer_same_mode, "transfer_same_mode", false);
  check_range(cfg.transfer_cross_mode, "transfer_cross_mode", false);
  require(cfg.product_value >= 0.0 && cfg.degradation_rate_per_day >= 0.0, "product value and degradation must be non-negative");
  require(cfg.early_penalty_per_day >= 0.0 && cfg.late_penalty_per_day >= 0.0, "penalties must be non-negative");
  require(cfg.shelf_life > 0.0, "shelf_life must be positive");
  require(cfg.quantity_min >= 1 && cfg.quantity_min <= cfg.quantity_max, "quantity range must be non-empty and positive");
  check_range(cfg.due_factor, "due_factor", true);
  require(cfg.feasibility_rate >= 0.0, "feasibility_rate must be non-negative");
  require(cfg.client_retry_cap >= 1, "client_retry_cap must be at least 1");
  require(cfg.budget_fraction >= 0.0, "budget_fraction must be non-negative");
}

Json to_json(const GeneratorConfig& cfg) {
  Json j;
  j["seed"] = cfg.seed;
  j["n_nodes"] = cfg.n_nodes;
  j["n_arcs"] = cfg.n_arcs;
  j["service_arc_targets"] = cfg.service_arc_targets;
  j["n_clients"] = cfg.n_clients;
  j["distance_km"] = range_json(cfg.distance_km);
  Json modes = Json::object();
  for (std::size_t i = 0; i < kModes.size(); ++i) {
    Json m;
    m["share"] = cfg.modes[i].share;
    m["speed_kmh"] = range_json(cfg.modes[i].speed_kmh);
    m["cost_per_km"] = range_json(cfg.modes[i].cost_per_km);
    modes[std::string(to_string(kModes[i]))] = m;
  }
  j["modes"] = modes;
  j["cost_divisor"] = cfg.cost_divisor;
  j["max_route_arcs"] = cfg.max_route_arcs;
  j["transfer_same_mode"] = range_json(cfg.transfer_same_mode);
  j["transfer_cross_mode"] = range_json(cfg.transfer_cross_mode);
  j["product_value"] = cfg.product_value;
  j["degradation_rate_per_day"] = cfg.degradation_rate_per_day;
  j["early_penalty_per_day"] = cfg.early_penalty_per_day;
  j["late_penalty_per_day"] = cfg.late_penalty_per_day;
  j["shelf_life"] = cfg.shelf_life;
  j["quantity"] = Json::array({cfg.quantity_min, cfg.quantity_max});
  j["due_factor"] = range_json(cfg.due_factor);
  j["feasibility_rate"] = cfg.feasibility_rate;
  j["client_retry_cap"] = cfg.client_retry_cap;
  j["budget_fraction"] = cfg.budget_fraction;
  return j;
}

GeneratorConfig config_from_json(const Json& j) {
  if (!j.is_object()) throw InvalidInput("generator config must be a JSON object");
  GeneratorConfig cfg;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "seed") cfg.seed = value.get<std::uint64_t>();
      else if (key == "n_nodes") cfg.n_nodes = value.get<int>();
      else if (key == "n_arcs") cfg.n_arcs = value.get<int>();
      else if (key == "service_arc_targets") cfg.service_arc_targets = value.get<std::vector<int>>();
      else if (key == "n_clients") cfg.n_clients = value.get<int>();
      else if (key == "distance_km") cfg.distance_km = range_from(value, key);
      else if (key == "modes") {
        for (const auto& [mode_name, m] : value.items()) {
          auto& params = cfg.modes[static_cast<std::size_t>(parse_mode(mode_name))];
          for (const auto& [field, v] : m.items()) {
            if (field == "share") params.share = v.get<double>();
            else if (field == "speed_kmh") params.speed_kmh = range_from(v, mode_name + " speed_kmh");
            else if (field == "cost_per_km") params.cost_per_km = range_from(v, mode_name + " cost_per_km");
            else throw InvalidInput("generator config: unknown mode field '" + field + "'");
          }
        }
      } else if (key == "cost_divisor") cfg.cost_divisor = value.get<double>();
      else if (key == "max_route_arcs") cfg.max_route_arcs = value.get<int>();
      else if (key == "transfer_same_mode") cfg.transfer_same_mode = range_from(value, key);
      else if (key == "transfer_cross_mode") cfg.transfer_cross_mode = range_from(value, key);
      else if (key == "product_value") cfg.product_value = value.get<double>();
      else if (key == "degradation_rate_per_day") cfg.degradation_rate_per_day = value.get<double>();
      else if (key == "early_penalty_per_day") cfg.early_penalty_per_day = value.get<double>();
      else if (key == "late_penalty_per_day") cfg.late_penalty_per_day = value.get<double>();
      else if (key == "shelf_life") cfg.shelf_life = value.get<double>();
      else if (key == "quantity") {
        auto q = value.get<std::vector<int>>();
        if (q.size() != 2) throw InvalidInput("generator config: quantity must be [min, max]");
        cfg.quantity_min = q[0];
        cfg.quantity_max = q[1];
      } else if (key == "due_factor") cfg.due_factor = range_from(value, key);
      else if (key == "feasibility_rate") cfg.feasibility_rate = value.get<double>();
      else if (key == "client_retry_cap") cfg.client_retry_cap = value.get<int>();
      else if (key == "budget_fraction") cfg.budget_fraction = value.get<double>();
      else throw InvalidInput("generator config: unknown key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("generator config: ") + e.what());
  }
  validate_config(cfg);
  return cfg;
}

BaseGraph generate_base_graph(const GeneratorConfig& cfg) {
  validate_config(cfg);
  BaseGraph g;
  g.origin = 0;
  for (int i = 0; i < cfg.n_nodes; ++i) g.nodes.push_back(i);

  std::set<std::pair<NodeId, NodeId>> used;
  Rng tree(cfg.seed, "tree");
  std::vector<NodeId> order(g.nodes.begin() + 1, g.nodes.end());
  tree.shuffle(order);
  std::vector<NodeId> placed{g.origin};
  for (NodeId n : order) {
    const NodeId parent = placed[tree.index(placed.size())];
    g.arcs.push_back({parent, n, 0.0});
    used.insert({parent, n});
    placed.push_back(n);
  }

  Rng extra(cfg.seed, "extra-arcs");
  while (g.arcs.size() < static_cast<std::size_t>(cfg.n_arcs)) {
    const NodeId from = g.nodes[extra.index(g.nodes.size())];
    const NodeId to = g.nodes[extra.index(g.nodes.size())];
    if (from == to || !used.insert({from, to}).second) continue;
    g.arcs.push_back({from, to, 0.0});
  }

  for (std::size_t k = 0; k < g.arcs.size(); ++k) {
    Rng draw(cfg.seed, "distance", k);
    g.arcs[k].distance_km = draw.uniform(cfg.distance_km.lo, cfg.distance_km.hi);
  }
  return g;
}

std::vector<ServiceNetwork> generate_services(const BaseGraph& base, const GeneratorConfig& cfg) {
  validate_config(cfg);
  if (base.arcs.size() > static_cast<std::size_t>(cfg.service_arc_targets.front()))
    throw InvalidInput("generator config: the first service-arc target cannot cover all " +
                       std::to_string(base.arcs.size()) + " arcs");
  ServiceBuilder builder(base, cfg);
  std::vector<ServiceNetwork> out;
  for (std::size_t level = 0; level < cfg.service_arc_targets.size(); ++level) {
    Rng rng(cfg.seed, "services", level);
    if (level == 0) builder.cover_all(rng);
    const auto target = static_cast<std::size_t>(cfg.service_arc_targets[level]);
    // Covering may overshoot only if a route outgrew the target, which the
    // arc count check above rules out.
    builder.fill_to(rng, target);
    out.push_back(builder.network());
  }
  return out;
}

CostParams generate_costs(const ServiceNetwork& net, const GeneratorConfig& cfg) {
  CostParams c;
  c.product_value = cfg.product_value;
  c.degradation_rate_per_day = cfg.degradation_rate_per_day;
  c.early_penalty_per_day = cfg.early_penalty_per_day;
  c.late_penalty_per_day = cfg.late_penalty_per_day;
  c.shelf_life = cfg.shelf_life;
  std::map<NodeId, std::set<ServiceId>> into, out_of;
  for (const auto& a : net.service_arcs) {
    into[a.to].insert(a.service);
    out_of[a.from].insert(a.service);
  }
  for (const auto& [node, incoming] : into) {
    for (ServiceId s1 : incoming) {
      for (ServiceId s2 : out_of[node]) {
        if (s1 == s2) continue;
        const auto id = (static_cast<std::uint64_t>(node) << 42) ^ (static_cast<std::uint64_t>(s1) << 21) ^
                        static_cast<std::uint64_t>(s2);
        Rng draw(cfg.seed, "transfer", id);
        const bool same = net.find_service(s1)->mode == net.find_service(s2)->mode;
        const Range& r = same ? cfg.transfer_same_mode : cfg.transfer_cross_mode;
        c.transshipment_cost[{node, s1, s2}] = draw.uniform(r.lo, r.hi);
      }
    }
  }
  return c;
}

std::vector<ClientOrder> generate_clients(const ServiceNetwork& net, int n, const GeneratorConfig& cfg) {
  if (n < 0 || static_cast<std::size_t>(n) + 1 > net.nodes.size())
    throw InvalidInput("cannot place " + std::to_string(n) + " clients on " + std::to_string(net.nodes.size()) + " nodes");
  const auto fastest = fastest_times(net);
  std::vector<ClientOrder> clients;
  std::set<NodeId> taken{net.origin};
  for (int slot = 0; slot < n; ++slot) {
    Rng rng(cfg.seed, "client", static_cast<std::uint64_t>(slot));
    bool placed = false;
    for (int attempt = 0; attempt < cfg.client_retry_cap && !placed; ++attempt) {
      const NodeId dest = net.nodes[rng.index(net.nodes.size())];
      if (taken.count(dest)) continue;
      const double t = fastest.at(dest);
      if (!std::isfinite(t) || t * (1.0 + cfg.feasibility_rate) > cfg.shelf_life) continue;
      ClientOrder c;
      c.id = slot;
      c.destination = dest;
      c.quantity = static_cast<double>(rng.integer(cfg.quantity_min, cfg.quantity_max));
      c.due_date = std::clamp(rng.uniform(cfg.due_factor.lo, cfg.due_factor.hi) * t, 1.0, cfg.shelf_life);
      clients.push_back(c);
      taken.insert(dest);
      placed = true;
    }
    if (!placed)
      throw InvalidInput("client slot " + std::to_string(slot) + ": no admissible destination after " +
                         std::to_string(cfg.client_retry_cap) + " draws");
  }
  return clients;
}

DisruptionProfile apply_disruption(const ServiceNetwork& net, double puv, double rate, std::uint64_t seed,
                                   double budget_fraction) {
  if (!(puv >= 0.0 && puv <= 1.0)) throw InvalidInput("puv must be in [0, 1]");
  if (!(rate >= 0.0 && rate <= 1.0)) throw InvalidInput("deviation rate must be in [0, 1]");
  const std::size_t n = net.service_arcs.size();
  std::vector<ArcIndex> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed, "puv", n);
  rng.shuffle(order);
  const auto count = static_cast<std::size_t>(std::ceil(puv * static_cast<double>(n) - 1e-9));
  DisruptionProfile p;
  p.uncertain_arcs.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(std::min(count, n)));
  std::sort(p.uncertain_arcs.begin(), p.uncertain_arcs.end());
  p.deviation_rate = rate;
  p.budget = budget_fraction * static_cast<double>(n);
  return p;
}

std::vector<Instance> generate_instances(const GeneratorConfig& cfg) {
  const BaseGraph base = generate_base_graph(cfg);
  const auto nets = generate_services(base, cfg);
  const auto clients = generate_clients(nets.front(), cfg.n_clients, cfg);
  std::vector<Instance> out;
  for (const auto& net : nets) {
    Instance inst;
    inst.network = net;
    inst.clients = clients;
    inst.costs = generate_costs(net, cfg);
    inst.disruption = apply_disruption(net, 0.0, 0.0, cfg.seed, cfg.budget_fraction);
    out.push_back(std::move(inst));
  }
  return out;
}

Instance disrupted(const Instance& instance, double puv, double rate, std::uint64_t seed, double budget_fraction) {
  Instance out = instance;
  out.disruption = apply_disruption(instance.network, puv, rate, seed, budget_fraction);
  out.network = with_disruption(instance.network, out.disruption);
  return out;
}

}  // namespace rmsn
