#include "rmsn/path_solver.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <limits>
#include <optional>
#include <queue>
#include <thread>

namespace rmsn {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string client_list(const std::vector<ClientId>& clients) {
  std::string out;
  for (ClientId c : clients) out += (out.empty() ? "" : ", ") + std::to_string(c);
  return out;
}

// Outbound-day dependent cost per product unit at optimal w, for a worst-case
// travel time that fits the shelf life.
double timing_cost_per_unit(double worst_time, const ClientOrder& order, const CostParams& costs) {
  double w = optimal_outbound(worst_time, order, costs);
  double arrival = w + worst_time;
  return costs.degradation_per_day() * arrival + costs.early_penalty_per_day * std::max(order.due_date - arrival, 0.0) +
         costs.late_penalty_per_day * std::max(arrival - order.due_date, 0.0);
}

// Reverse Dijkstra over service-arcs towards `target` with per-arc weights.
std::vector<double> distances_to(const ExpandedGraph& graph, std::size_t target, const std::function<double(ArcIndex)>& weight) {
  std::vector<double> dist(graph.node_count(), kInf);
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  dist[target] = 0.0;
  queue.push({0.0, target});
  while (!queue.empty()) {
    auto [d, node] = queue.top();
    queue.pop();
    if (d > dist[node]) continue;
    for (ArcIndex a : graph.arcs_into(node)) {
      std::size_t from = graph.tail(a);
      double cand = d + weight(a);
      if (cand < dist[from]) {
        dist[from] = cand;
        queue.push({cand, from});
      }
    }
  }
  return dist;
}

// Forward Dijkstra from the origin; returns the arc path to `target` or empty.
Path cheapest_path(const ExpandedGraph& graph, std::size_t target, const std::function<double(ArcIndex)>& weight) {
  std::vector<double> dist(graph.node_count(), kInf);
  std::vector<ArcIndex> via(graph.node_count(), std::numeric_limits<ArcIndex>::max());
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  dist[graph.origin()] = 0.0;
  queue.push({0.0, graph.origin()});
  while (!queue.empty()) {
    auto [d, node] = queue.top();
    queue.pop();
    if (d > dist[node]) continue;
    for (ArcIndex a : graph.arcs_out_of(node)) {
      std::size_t to = graph.head(a);
      double cand = d + weight(a);
      if (cand < dist[to]) {
        dist[to] = cand;
        via[to] = a;
        queue.push({cand, to});
      }
    }
  }
  Path path;
  if (dist[target] == kInf) return path;
  for (std::size_t node = target; node != graph.origin(); node = graph.tail(via[node])) path.push_back(via[node]);
  std::reverse(path.begin(), path.end());
  return path;
}

// Depth-first enumeration of node-simple paths in ascending lexicographic
// order, pruned by admissible completion bounds.
class ClientSearch {
 public:
  ClientSearch(const ServiceNetwork& net, const ExpandedGraph& graph, const ClientOrder& order, double budget,
               const CostParams& costs)
      : net_(net), graph_(graph), order_(order), budget_(budget), costs_(costs) {
    target_ = graph.dense(order.destination);
    min_cost_ = distances_to(graph, target_, [&](ArcIndex a) { return net.service_arcs[a].unit_cost; });
    min_time_ = distances_to(graph, target_, [&](ArcIndex a) { return net.service_arcs[a].nominal_time; });
    visited_.assign(graph.node_count(), 0);
  }

  bool run() {
    if (target_ == graph_.origin()) return false;
    seed_upper_bound();
    visited_[graph_.origin()] = 1;
    for (ArcIndex a : graph_.source_arcs()) extend(a, 0.0);
    return !best_path_.empty();
  }

  const Path& best_path() const { return best_path_; }

 private:
  double slack(double value) const { return 1e-12 * std::max(1.0, std::abs(value)); }

  // Exact total for a complete path, or +inf when it breaks the shelf life.
  double path_total(const Path& path) const {
    auto timed = timed_path(net_, path);
    double worst = worst_case_delay(timed, budget_).total_time;
    if (worst > costs_.shelf_life + kTolerance) return kInf;
    double per_unit = 0.0;
    for (ArcIndex a : path) per_unit += net_.service_arcs[a].unit_cost;
    per_unit += graph_.transfer_cost(path);
    per_unit += timing_cost_per_unit(worst, order_, costs_);
    return order_.quantity * per_unit;
  }

  void seed_upper_bound() {
    for (auto weight : {std::function<double(ArcIndex)>([&](ArcIndex a) { return net_.service_arcs[a].unit_cost; }),
                        std::function<double(ArcIndex)>([&](ArcIndex a) { return net_.service_arcs[a].nominal_time; }),
                        std::function<double(ArcIndex)>([&](ArcIndex a) {
                          return net_.service_arcs[a].nominal_time + net_.service_arcs[a].max_deviation;
                        })}) {
      Path path = cheapest_path(graph_, target_, weight);
      if (!path.empty()) upper_bound_ = std::min(upper_bound_, path_total(path));
    }
  }

  double prefix_delay() const {
    double remaining = budget_;
    double delay = 0.0;
    for (double dev : deviations_) {
      if (remaining <= 0.0) break;
      double u = std::min(1.0, remaining);
      delay += u * dev;
      remaining -= u;
    }
    return delay;
  }

  void extend(ArcIndex arc, double transfer) {
    const std::size_t node = graph_.head(arc);
    if (visited_[node] || min_cost_[node] == kInf) return;
    const ServiceArc& sa = net_.service_arcs[arc];

    path_.push_back(arc);
    cost_ += sa.unit_cost + transfer;
    nominal_ += sa.nominal_time;
    // Nested calls restore deviations_ before returning, so the slot stays valid.
    std::size_t slot = 0;
    if (sa.max_deviation > 0.0) {
      auto at = std::upper_bound(deviations_.begin(), deviations_.end(), sa.max_deviation, std::greater<>());
      slot = static_cast<std::size_t>(at - deviations_.begin());
      deviations_.insert(at, sa.max_deviation);
    }

    const double time_bound = nominal_ + prefix_delay() + min_time_[node];
    if (time_bound <= costs_.shelf_life + kTolerance) {
      if (node == target_) {
        double total = path_total(path_);
        if (total < best_total_ - kTolerance) {
          best_total_ = total;
          best_path_ = path_;
        }
      } else {
        double bound = order_.quantity * (cost_ + min_cost_[node] + timing_cost_per_unit(time_bound, order_, costs_));
        bool pruned = bound > upper_bound_ + kTolerance + slack(upper_bound_) ||
                      (best_total_ < kInf && bound >= best_total_ - kTolerance + slack(best_total_));
        if (!pruned) {
          visited_[node] = 1;
          for (const auto& edge : graph_.successors(arc)) extend(edge.to, edge.transfer_cost);
          visited_[node] = 0;
        }
      }
    }

    if (sa.max_deviation > 0.0) deviations_.erase(deviations_.begin() + static_cast<std::ptrdiff_t>(slot));
    nominal_ -= sa.nominal_time;
    cost_ -= sa.unit_cost + transfer;
    path_.pop_back();
  }

  const ServiceNetwork& net_;
  const ExpandedGraph& graph_;
  const ClientOrder& order_;
  double budget_;
  const CostParams& costs_;
  std::size_t target_ = 0;
  std::vector<double> min_cost_;
  std::vector<double> min_time_;
  std::vector<char> visited_;

  Path path_;
  double cost_ = 0.0;
  double nominal_ = 0.0;
  std::vector<double> deviations_;  // descending

  double upper_bound_ = kInf;
  double best_total_ = kInf;
  Path best_path_;
};

RobustItinerary make_itinerary(const ServiceNetwork& net, const ClientOrder& order, Path path,
                               const DisruptionProfile& profile, const CostParams& costs) {
  RobustItinerary it;
  it.client = order.id;
  it.worst_case = worst_case_delay(net, path, profile.budget);
  it.outbound_day = optimal_outbound(it.worst_case.total_time, order, costs);
  it.costs = evaluate_itinerary(net, order, path, it.outbound_day, profile, costs);
  it.path = std::move(path);
  return it;
}

}  // namespace

CostBreakdown& CostBreakdown::operator+=(const CostBreakdown& other) {
  transport += other.transport;
  transshipment += other.transshipment;
  degradation += other.degradation;
  earliness_penalty += other.earliness_penalty;
  lateness_penalty += other.lateness_penalty;
  total += other.total;
  return *this;
}

Infeasible::Infeasible(std::vector<ClientId> clients, const std::string& what)
    : Error(what + " (clients: " + client_list(clients) + ")"), clients_(std::move(clients)) {}

CostBreakdown evaluate_itinerary(const ServiceNetwork& net, const ClientOrder& order, const Path& path, double outbound_day,
                                 const DisruptionProfile& profile, const CostParams& costs) {
  if (std::string defect = describe_path_defect(net, path, order.destination); !defect.empty())
    throw InvalidInput("client " + std::to_string(order.id) + ": " + defect);
  if (!(outbound_day >= 0.0)) throw InvalidInput("outbound day must be non-negative");

  const WorstCaseResult worst = worst_case_delay(net, path, profile.budget);
  const double arrival = outbound_day + worst.total_time;
  if (arrival > costs.shelf_life + kTolerance) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "client %d: worst-case arrival %.6g exceeds shelf life %.6g", order.id, arrival,
                  costs.shelf_life);
    throw InfeasibleItinerary(buf);
  }

  const double q = order.quantity;
  CostBreakdown out;
  for (ArcIndex k : path) out.transport += net.service_arcs[k].unit_cost;
  out.transport *= q;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const auto& in = net.service_arcs[path[i]];
    const auto& next = net.service_arcs[path[i + 1]];
    out.transshipment += costs.transfer_cost(in.to, in.service, next.service);
  }
  out.transshipment *= q;
  out.degradation = costs.degradation_per_day() * q * arrival;
  out.earliness_penalty = costs.early_penalty_per_day * q * std::max(order.due_date - arrival, 0.0);
  out.lateness_penalty = costs.late_penalty_per_day * q * std::max(arrival - order.due_date, 0.0);
  out.total = out.transport + out.transshipment + out.degradation + out.earliness_penalty + out.lateness_penalty;
  return out;
}

double optimal_outbound(double worst_time, const ClientOrder& order, const CostParams& costs) {
  if (worst_time > costs.shelf_life + kTolerance) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "client %d: worst-case travel time %.6g exceeds shelf life %.6g", order.id, worst_time,
                  costs.shelf_life);
    throw InfeasibleItinerary(buf);
  }
  const double latest = std::max(costs.shelf_life - worst_time, 0.0);
  if (costs.degradation_per_day() < costs.early_penalty_per_day)
    return std::clamp(order.due_date - worst_time, 0.0, latest);
  return 0.0;
}

RobustItinerary solve_client(const ServiceNetwork& net, const ExpandedGraph& graph, const ClientOrder& order,
                             const DisruptionProfile& profile, const CostParams& costs) {
  if (!(profile.budget >= 0.0)) throw InvalidInput("budget must be non-negative");
  ClientSearch search(net, graph, order, profile.budget, costs);
  if (!search.run()) throw Infeasible({order.id}, "no itinerary within the shelf life");
  return make_itinerary(net, order, search.best_path(), profile, costs);
}

RobustItinerary solve_client(const ServiceNetwork& net, const ClientOrder& order, const DisruptionProfile& profile,
                             const CostParams& costs) {
  ExpandedGraph graph(net, costs);
  return solve_client(net, graph, order, profile, costs);
}

InstanceSolution solve_instance(const ServiceNetwork& net, const std::vector<ClientOrder>& orders,
                                const DisruptionProfile& profile, const CostParams& costs, const SolveOptions& options) {
  ExpandedGraph graph(net, costs);
  std::vector<std::optional<RobustItinerary>> results(orders.size());
  std::vector<std::exception_ptr> errors(orders.size());

  auto work = [&](std::size_t i) {
    try {
      results[i] = solve_client(net, graph, orders[i], profile, costs);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  unsigned workers = std::min<unsigned>(std::max(1u, options.workers), static_cast<unsigned>(orders.size()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < orders.size(); ++i) work(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < workers; ++t)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < orders.size(); i = next++) work(i);
      });
    for (auto& t : pool) t.join();
  }

  std::vector<ClientId> infeasible;
  for (std::size_t i = 0; i < orders.size(); ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const Infeasible&) {
      infeasible.push_back(orders[i].id);
    }
  }
  if (!infeasible.empty()) throw Infeasible(infeasible, "no itinerary within the shelf life");

  InstanceSolution solution;
  for (auto& r : results) {
    solution.total += r->costs;
    solution.itineraries.push_back(std::move(*r));
  }
  return solution;
}

// ---------------------------------------------------------------------------
// Reference oracle. Shares nothing with the search above beyond the data types.

namespace {

struct OracleWorst {
  double delay = 0.0;
  std::vector<std::pair<ArcIndex, double>> u;
};

double floor_to_grid(double value) {
  constexpr double step = 1e-3;
  return std::floor(value / step + 1e-9) * step;
}

// Maximizes sum(u * dev) over vertices of {sum u <= budget, 0 <= u <= 1}:
// a set of arcs at u = 1 plus at most one arc at a fractional grid value.
OracleWorst oracle_worst_case(const std::vector<ArcIndex>& path, const std::vector<double>& dev, double budget) {
  const std::size_t k = path.size();
  OracleWorst best;
  best.delay = -1.0;
  for (unsigned mask = 0; mask < (1u << k); ++mask) {
    const int full = std::popcount(mask);
    if (full > budget + 1e-12) continue;
    const double rest = floor_to_grid(std::min(1.0, budget - full));
    double base = 0.0;
    for (std::size_t i = 0; i < k; ++i)
      if (mask & (1u << i)) base += dev[i];
    // j == k means no fractional arc.
    for (std::size_t j = 0; j <= k; ++j) {
      if (j < k && (mask & (1u << j))) continue;
      double value = base + (j < k ? rest * dev[j] : 0.0);
      if (value > best.delay + 1e-12) {
        best.delay = value;
        best.u.clear();
        for (std::size_t i = 0; i < k; ++i)
          if ((mask & (1u << i)) && dev[i] > 0.0) best.u.emplace_back(path[i], 1.0);
        if (j < k && rest > 0.0 && dev[j] > 0.0) best.u.emplace_back(path[j], rest);
      }
    }
  }
  std::sort(best.u.begin(), best.u.end());
  return best;
}

}  // namespace

RobustItinerary brute_force_oracle(const ServiceNetwork& net, const ClientOrder& order, const DisruptionProfile& profile,
                                   const CostParams& costs) {
  if (net.nodes.size() > kOracleMaxNodes)
    throw InvalidInput("brute-force oracle limited to " + std::to_string(kOracleMaxNodes) + " nodes");

  const double q = order.quantity;
  const double psi = costs.degradation_per_day();
  std::optional<RobustItinerary> best;
  std::vector<ArcIndex> path;
  std::vector<NodeId> visited{net.origin};

  auto consider = [&] {
    std::vector<double> dev;
    double nominal = 0.0, transport = 0.0, transfer = 0.0;
    for (std::size_t i = 0; i < path.size(); ++i) {
      const auto& a = net.service_arcs[path[i]];
      dev.push_back(a.max_deviation);
      nominal += a.nominal_time;
      transport += a.unit_cost;
      if (i > 0) {
        const auto& prev = net.service_arcs[path[i - 1]];
        transfer += prev.service == a.service ? 0.0 : costs.transfer_cost(a.from, prev.service, a.service);
      }
    }
    OracleWorst worst = oracle_worst_case(path, dev, profile.budget);
    const double travel = nominal + worst.delay;
    if (travel > costs.shelf_life + kTolerance) return;

    // The cost in w is convex piecewise linear; its minimum is at a breakpoint.
    const double latest = std::max(costs.shelf_life - travel, 0.0);
    double best_w = 0.0, best_timing = kInf;
    for (double w : {0.0, std::clamp(order.due_date - travel, 0.0, latest), latest}) {
      double a = w + travel;
      double timing = psi * a + costs.early_penalty_per_day * std::max(order.due_date - a, 0.0) +
                      costs.late_penalty_per_day * std::max(a - order.due_date, 0.0);
      if (timing < best_timing - 1e-12 || (std::abs(timing - best_timing) <= 1e-12 && w < best_w)) {
        best_timing = timing;
        best_w = w;
      }
    }
    const double arrival = best_w + travel;
    CostBreakdown c;
    c.transport = q * transport;
    c.transshipment = q * transfer;
    c.degradation = q * psi * arrival;
    c.earliness_penalty = q * costs.early_penalty_per_day * std::max(order.due_date - arrival, 0.0);
    c.lateness_penalty = q * costs.late_penalty_per_day * std::max(arrival - order.due_date, 0.0);
    c.total = c.transport + c.transshipment + c.degradation + c.earliness_penalty + c.lateness_penalty;

    if (!best || c.total < best->costs.total - kTolerance) {
      RobustItinerary it;
      it.client = order.id;
      it.path = path;
      it.outbound_day = best_w;
      it.worst_case.delay = worst.delay;
      it.worst_case.total_time = travel;
      it.worst_case.u_assignment = worst.u;
      it.costs = c;
      best = std::move(it);
    }
  };

  std::function<void(NodeId)> walk = [&](NodeId at) {
    for (ArcIndex k = 0; k < net.service_arcs.size(); ++k) {
      const auto& a = net.service_arcs[k];
      if (a.from != at || std::find(visited.begin(), visited.end(), a.to) != visited.end()) continue;
      path.push_back(k);
      if (a.to == order.destination) {
        consider();
      } else {
        visited.push_back(a.to);
        walk(a.to);
        visited.pop_back();
      }
      path.pop_back();
    }
  };
  if (order.destination != net.origin) walk(net.origin);
  if (!best) throw Infeasible({order.id}, "no itinerary within the shelf life");
  return *best;
}

}  // namespace rmsn
