#include "rmsn/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <thread>
#include <tuple>

namespace rmsn {

namespace {

void check_levels(const std::vector<double>& levels, const std::string& name) {
  if (levels.empty()) throw InvalidInput(name + " must not be empty");
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (!(levels[i] >= 0.0 && levels[i] <= 1.0)) throw InvalidInput(name + " must lie in [0, 1]");
    if (i > 0 && !(levels[i] > levels[i - 1])) throw InvalidInput(name + " must be strictly increasing");
  }
}

auto cell_key(const SweepCell& c) { return std::tie(c.network_size, c.clients, c.puv, c.deviation_rate, c.seed); }

Json costs_json(const CostBreakdown& c) {
  Json j;
  j["transport"] = c.transport;
  j["transshipment"] = c.transshipment;
  j["degradation"] = c.degradation;
  j["earliness_penalty"] = c.earliness_penalty;
  j["lateness_penalty"] = c.lateness_penalty;
  j["total"] = c.total;
  return j;
}

CostBreakdown costs_from(const Json& j) {
  CostBreakdown c;
  c.transport = j.at("transport").get<double>();
  c.transshipment = j.at("transshipment").get<double>();
  c.degradation = j.at("degradation").get<double>();
  c.earliness_penalty = j.at("earliness_penalty").get<double>();
  c.lateness_penalty = j.at("lateness_penalty").get<double>();
  c.total = j.at("total").get<double>();
  return c;
}

template <typename Fn>
void parallel_for(std::size_t count, unsigned workers, Fn&& fn) {
  workers = std::min<unsigned>(std::max(1u, workers), static_cast<unsigned>(std::max<std::size_t>(count, 1)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < workers; ++t)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

struct ClientOutcome {
  bool feasible = false;
  CostBreakdown costs;
  double seconds = 0.0;
};

}  // namespace

void validate_sweep_config(const SweepConfig& cfg) {
  validate_config(cfg.generator);
  if (cfg.seeds.empty()) throw InvalidInput("seeds must not be empty");
  check_levels(cfg.puv_levels, "puv_levels");
  check_levels(cfg.rate_levels, "rate_levels");
  if (cfg.client_levels.empty()) throw InvalidInput("client_levels must not be empty");
  for (std::size_t i = 0; i < cfg.client_levels.size(); ++i) {
    if (cfg.client_levels[i] < 1) throw InvalidInput("client_levels must be positive");
    if (i > 0 && cfg.client_levels[i] <= cfg.client_levels[i - 1])
      throw InvalidInput("client_levels must be strictly increasing");
  }
  if (cfg.client_levels.back() > cfg.generator.n_nodes - 1)
    throw InvalidInput("client_levels exceed the number of destinations");
}

Json to_json(const SweepConfig& cfg) {
  Json j;
  j["generator"] = to_json(cfg.generator);
  j["seeds"] = cfg.seeds;
  j["puv_levels"] = cfg.puv_levels;
  j["rate_levels"] = cfg.rate_levels;
  j["client_levels"] = cfg.client_levels;
  j["workers"] = cfg.workers;
  return j;
}

SweepConfig sweep_config_from_json(const Json& j) {
  if (!j.is_object()) throw InvalidInput("sweep config must be a JSON object");
  SweepConfig cfg;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "generator") cfg.generator = config_from_json(value);
      else if (key == "seeds") cfg.seeds = value.get<std::vector<std::uint64_t>>();
      else if (key == "puv_levels") cfg.puv_levels = value.get<std::vector<double>>();
      else if (key == "rate_levels") cfg.rate_levels = value.get<std::vector<double>>();
      else if (key == "client_levels") cfg.client_levels = value.get<std::vector<int>>();
      else if (key == "workers") cfg.workers = value.get<unsigned>();
      else throw InvalidInput("sweep config: unknown key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("sweep config: ") + e.what());
  }
  validate_sweep_config(cfg);
  return cfg;
}

SweepResults run_sweep(const SweepConfig& cfg, const SweepProgress& progress) {
  validate_sweep_config(cfg);
  const std::size_t n_seeds = cfg.seeds.size();
  const std::size_t n_nets = cfg.generator.service_arc_targets.size();
  const std::size_t n_puv = cfg.puv_levels.size();
  const std::size_t n_rate = cfg.rate_levels.size();
  const int max_clients = cfg.client_levels.back();

  std::vector<std::vector<Instance>> families(n_seeds);
  parallel_for(n_seeds, cfg.workers, [&](std::size_t s) {
    GeneratorConfig g = cfg.generator;
    g.seed = cfg.seeds[s];
    g.n_clients = max_clients;
    families[s] = generate_instances(g);
  });

  // One task per (seed, network, puv, rate); clients are solved once and
  // summed into every client level since the objective separates.
  const std::size_t tasks = n_seeds * n_nets * n_puv * n_rate;
  std::vector<std::vector<ClientOutcome>> outcomes(tasks);
  std::atomic<std::size_t> done{0};
  parallel_for(tasks, cfg.workers, [&](std::size_t t) {
    std::size_t rest = t;
    const std::size_t r = rest % n_rate;
    rest /= n_rate;
    const std::size_t p = rest % n_puv;
    rest /= n_puv;
    const std::size_t n = rest % n_nets;
    const std::size_t s = rest / n_nets;
    const Instance inst =
        disrupted(families[s][n], cfg.puv_levels[p], cfg.rate_levels[r], cfg.seeds[s], cfg.generator.budget_fraction);
    const ExpandedGraph graph(inst.network, inst.costs);
    auto& out = outcomes[t];
    for (const auto& order : inst.clients) {
      ClientOutcome o;
      const auto start = std::chrono::steady_clock::now();
      try {
        o.costs = solve_client(inst.network, graph, order, inst.disruption, inst.costs).costs;
        o.feasible = true;
      } catch (const Infeasible&) {
      }
      o.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      out.push_back(o);
    }
    const std::size_t finished = ++done;
    if (progress) progress(finished, tasks);
  });

  SweepResults results;
  results.config = cfg;
  for (std::size_t t = 0; t < tasks; ++t) {
    std::size_t rest = t;
    const std::size_t r = rest % n_rate;
    rest /= n_rate;
    const std::size_t p = rest % n_puv;
    rest /= n_puv;
    const std::size_t n = rest % n_nets;
    const std::size_t s = rest / n_nets;
    for (int level : cfg.client_levels) {
      SweepCell cell;
      cell.network_size = cfg.generator.service_arc_targets[n];
      cell.clients = level;
      cell.puv = cfg.puv_levels[p];
      cell.deviation_rate = cfg.rate_levels[r];
      cell.seed = cfg.seeds[s];
      for (int c = 0; c < level; ++c) {
        const auto& o = outcomes[t][static_cast<std::size_t>(c)];
        cell.solve_time_seconds += o.seconds;
        if (o.feasible) cell.costs += o.costs;
        else cell.infeasible_clients.push_back(families[s][n].clients[static_cast<std::size_t>(c)].id);
      }
      if (!cell.infeasible_clients.empty()) {
        cell.status = CellStatus::infeasible;
        cell.costs = {};
      }
      results.cells.push_back(std::move(cell));
    }
  }
  std::sort(results.cells.begin(), results.cells.end(),
            [](const SweepCell& a, const SweepCell& b) { return cell_key(a) < cell_key(b); });
  return results;
}

Json to_json(const SweepResults& results) {
  Json j;
  j["config"] = to_json(results.config);
  Json cells = Json::array();
  for (const auto& c : results.cells) {
    Json cj;
    cj["network_size"] = c.network_size;
    cj["clients"] = c.clients;
    cj["puv"] = c.puv;
    cj["deviation_rate"] = c.deviation_rate;
    cj["seed"] = c.seed;
    cj["status"] = c.status == CellStatus::optimal ? "optimal" : "infeasible";
    cj["costs"] = costs_json(c.costs);
    cj["solve_time_seconds"] = c.solve_time_seconds;
    cj["infeasible_clients"] = c.infeasible_clients;
    cells.push_back(std::move(cj));
  }
  j["cells"] = std::move(cells);
  return j;
}

SweepResults sweep_results_from_json(const Json& j) {
  SweepResults r;
  try {
    r.config = sweep_config_from_json(j.at("config"));
    for (const auto& cj : j.at("cells")) {
      SweepCell c;
      c.network_size = cj.at("network_size").get<int>();
      c.clients = cj.at("clients").get<int>();
      c.puv = cj.at("puv").get<double>();
      c.deviation_rate = cj.at("deviation_rate").get<double>();
      c.seed = cj.at("seed").get<std::uint64_t>();
      const auto status = cj.at("status").get<std::string>();
      if (status == "optimal") c.status = CellStatus::optimal;
      else if (status == "infeasible") c.status = CellStatus::infeasible;
      else throw InvalidInput("sweep results: unknown status '" + status + "'");
      c.costs = costs_from(cj.at("costs"));
      c.solve_time_seconds = cj.at("solve_time_seconds").get<double>();
      c.infeasible_clients = cj.at("infeasible_clients").get<std::vector<ClientId>>();
      r.cells.push_back(std::move(c));
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("sweep results: ") + e.what());
  }
  std::sort(r.cells.begin(), r.cells.end(), [](const SweepCell& a, const SweepCell& b) { return cell_key(a) < cell_key(b); });
  return r;
}

ResilienceMetrics resilience_metrics(const SweepResults& results, double threshold) {
  using Stratum = std::tuple<int, int, std::uint64_t>;
  std::map<Stratum, const SweepCell*> baselines;
  for (const auto& c : results.cells) {
    if (c.puv != 0.0) continue;
    auto& slot = baselines[{c.network_size, c.clients, c.seed}];
    if (!slot || c.deviation_rate < slot->deviation_rate) slot = &c;
  }

  ResilienceMetrics m;
  for (const auto& c : results.cells) {
    const Stratum key{c.network_size, c.clients, c.seed};
    auto it = baselines.find(key);
    const std::string name = "|V|=" + std::to_string(c.network_size) + ", clients=" + std::to_string(c.clients) +
                             ", seed=" + std::to_string(c.seed);
    if (it == baselines.end()) throw InvalidInput("missing puv=0 baseline for " + name);
    if (it->second->status != CellStatus::optimal) throw InvalidInput("infeasible puv=0 baseline for " + name);
    if (c.status != CellStatus::optimal) continue;
    MetricRow row;
    row.network_size = c.network_size;
    row.clients = c.clients;
    row.puv = c.puv;
    row.deviation_rate = c.deviation_rate;
    row.seed = c.seed;
    row.total = c.costs.total;
    row.baseline = it->second->costs.total;
    row.absolute_change = row.total - row.baseline;
    row.relative_change = row.baseline != 0.0 ? row.absolute_change / row.baseline : 0.0;
    m.rows.push_back(row);
  }

  // Mean relative change per (network, clients, rate) at the highest puv.
  std::map<std::pair<int, int>, std::map<double, std::pair<double, int>>> at_full;
  double top_puv = -1.0;
  for (const auto& r : m.rows) top_puv = std::max(top_puv, r.puv);
  for (const auto& c : results.cells) top_puv = std::max(top_puv, c.puv);
  std::map<std::pair<int, int>, bool> strata;
  for (const auto& c : results.cells) strata[{c.network_size, c.clients}] = true;
  for (const auto& r : m.rows) {
    if (r.puv != top_puv) continue;
    auto& acc = at_full[{r.network_size, r.clients}][r.deviation_rate];
    acc.first += r.relative_change;
    acc.second += 1;
  }
  for (const auto& [stratum, unused] : strata) {
    (void)unused;
    RobustnessDegree d;
    d.network_size = stratum.first;
    d.clients = stratum.second;
    for (const auto& [rate, acc] : at_full[stratum]) {
      if (acc.first / acc.second < threshold) d.degree = rate;
      else break;
    }
    m.robustness.push_back(d);
  }
  return m;
}

std::vector<CriticalArc> rank_critical_arcs(const ServiceNetwork& net, const std::vector<ClientOrder>& orders,
                                            const CostParams& costs, double rate, double budget, unsigned workers) {
  if (!(rate >= 0.0)) throw InvalidInput("deviation rate must be non-negative");
  DisruptionProfile nominal;
  nominal.deviation_rate = rate;
  nominal.budget = budget;
  const ServiceNetwork base = with_disruption(net, nominal);
  SolveOptions options;
  options.workers = workers;
  const InstanceSolution reference = solve_instance(base, orders, nominal, costs, options);

  // Deviation on an arc no chosen path uses cannot lower any other path's
  // cost below the current optimum, so only used arcs are re-solved.
  std::vector<bool> used(net.service_arcs.size(), false);
  for (const auto& it : reference.itineraries)
    for (ArcIndex k : it.path) used[k] = true;

  std::vector<CriticalArc> out(net.service_arcs.size());
  for (ArcIndex k = 0; k < out.size(); ++k) out[k].index = k;
  std::vector<ArcIndex> candidates;
  for (ArcIndex k = 0; k < used.size(); ++k)
    if (used[k]) candidates.push_back(k);
  parallel_for(candidates.size(), workers, [&](std::size_t i) {
    DisruptionProfile single = nominal;
    single.uncertain_arcs = {candidates[i]};
    const ServiceNetwork stressed = with_disruption(net, single);
    double total = 0.0;
    try {
      total = solve_instance(stressed, orders, single, costs).total.total;
    } catch (const Infeasible&) {
      total = std::numeric_limits<double>::infinity();
    }
    out[candidates[i]].impact = std::max(total - reference.total.total, 0.0);
  });
  std::stable_sort(out.begin(), out.end(), [](const CriticalArc& a, const CriticalArc& b) { return a.impact > b.impact; });
  return out;
}

}  // namespace rmsn
