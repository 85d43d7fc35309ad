#include <filesystem>
#include <map>

#include "doctest.h"
#include "support.hpp"

#include "rmsn/experiments.hpp"
#include "rmsn/instance_io.hpp"

using namespace rmsn;

namespace {

const SweepResults& default_sweep() {
  static const SweepResults results = [] {
    SweepConfig cfg;
    cfg.workers = 4;
    return run_sweep(cfg);
  }();
  return results;
}

SweepCell cell(int network, int clients, double puv, double rate, double total, std::uint64_t seed = 1) {
  SweepCell c;
  c.network_size = network;
  c.clients = clients;
  c.puv = puv;
  c.deviation_rate = rate;
  c.seed = seed;
  c.costs.total = total;
  return c;
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST_CASE("default grid gives 225 cells, each once") {
  const auto& r = default_sweep();
  CHECK(r.cells.size() == 225);
  std::set<std::tuple<int, int, double, double>> keys;
  for (const auto& c : r.cells) keys.insert({c.network_size, c.clients, c.puv, c.deviation_rate});
  CHECK(keys.size() == 225);
  for (const auto& c : r.cells) CHECK(c.status == CellStatus::optimal);
}

TEST_CASE("deviation rate has no effect without uncertain arcs") {
  const auto& r = default_sweep();
  std::map<std::pair<int, int>, double> first;
  for (const auto& c : r.cells) {
    if (c.puv != 0.0) continue;
    auto [it, inserted] = first.emplace(std::make_pair(c.network_size, c.clients), c.costs.total);
    if (!inserted) CHECK(c.costs.total == it->second);
  }
  CHECK(first.size() == 9);
}

TEST_CASE("costs are monotone in rate and in nested puv") {
  const auto& r = default_sweep();
  std::map<std::tuple<int, int, double, double>, double> total;
  for (const auto& c : r.cells) total[{c.network_size, c.clients, c.puv, c.deviation_rate}] = c.costs.total;
  const auto& levels = r.config.puv_levels;
  for (const auto& [key, t] : total) {
    const auto [n, k, p, rate] = key;
    for (double q : levels)
      if (q > p) CHECK(total[{n, k, q, rate}] >= t - 1e-9);
    for (double s : r.config.rate_levels)
      if (s > rate) CHECK(total[{n, k, p, s}] >= t - 1e-9);
  }
}

TEST_CASE("repeated sweeps give identical totals") {
  SweepConfig cfg;
  cfg.client_levels = {1, 3};
  cfg.puv_levels = {0.0, 0.5};
  cfg.rate_levels = {0.0, 1.0};
  const auto a = run_sweep(cfg);
  cfg.workers = 3;
  const auto b = run_sweep(cfg);
  REQUIRE(a.cells.size() == b.cells.size());
  for (std::size_t i = 0; i < a.cells.size(); ++i) CHECK(a.cells[i].costs.total == b.cells[i].costs.total);
}

TEST_CASE("sweep results survive a JSON round trip") {
  const auto& r = default_sweep();
  const auto back = sweep_results_from_json(parse_json(dump_json(to_json(r)), "memory"));
  CHECK(dump_json(to_json(back)) == dump_json(to_json(r)));
}

TEST_CASE("relative change against the baseline") {
  SweepResults r;
  r.cells = {cell(50, 1, 0.0, 0.0, 12246), cell(50, 1, 1.0, 1.0, 153613), cell(50, 1, 1.0, 0.5, 12246)};
  const auto m = resilience_metrics(r);
  REQUIRE(m.rows.size() == 3);
  CHECK(m.rows[1].relative_change == doctest::Approx(153613.0 / 12246.0 - 1.0));
  CHECK(m.rows[1].relative_change == doctest::Approx(11.543).epsilon(1e-4));
  CHECK(m.rows[1].absolute_change == doctest::Approx(153613.0 - 12246.0));
  CHECK(m.rows[2].relative_change == 0.0);
  REQUIRE(m.robustness.size() == 1);
  REQUIRE(m.robustness[0].degree.has_value());
  CHECK(*m.robustness[0].degree == 0.5);
}

TEST_CASE("missing baseline names the stratum") {
  SweepResults r;
  r.cells = {cell(100, 3, 0.5, 0.5, 10.0, 7)};
  CHECK_THROWS_WITH_AS(resilience_metrics(r), doctest::Contains("|V|=100, clients=3, seed=7"), InvalidInput);
}

TEST_CASE("relative change grows along nested puv in the default sweep") {
  const auto m = resilience_metrics(default_sweep());
  std::map<std::tuple<int, int, double, double>, double> change;
  for (const auto& row : m.rows) change[{row.network_size, row.clients, row.deviation_rate, row.puv}] = row.relative_change;
  double previous = 0.0;
  std::tuple<int, int, double> stratum{-1, -1, -1.0};
  for (const auto& [key, value] : change) {
    const auto [n, k, rate, puv] = key;
    if (std::tuple{n, k, rate} != stratum) {
      stratum = {n, k, rate};
      previous = -1.0;
    }
    CHECK(value >= previous - 1e-12);
    previous = value;
  }
}

TEST_CASE("critical arcs on a two-route instance") {
  auto inst = test::two_leg_instance();
  // A parallel slow service 0 -> 2 that is never chosen.
  inst.network.arcs.push_back({0, 2, 900.0});
  inst.network.services.push_back({2, Mode::water, {0, 2}});
  inst.network.service_arcs.push_back({2, 0, 2, 25.0, 0.0, 200.0});
  inst.clients[0].due_date = 10.0;
  const auto ranked = rank_critical_arcs(inst.network, inst.clients, inst.costs, 1.0, 1.0);
  REQUIRE(ranked.size() == 3);
  std::map<ArcIndex, double> impact;
  for (const auto& a : ranked) {
    impact[a.index] = a.impact;
    CHECK(a.impact >= 0.0);
  }
  CHECK(impact[2] == 0.0);
  CHECK(impact[1] > 0.0);
  CHECK(impact[0] > 0.0);
  for (std::size_t i = 1; i < ranked.size(); ++i) {
    CHECK(ranked[i - 1].impact >= ranked[i].impact);
    if (ranked[i - 1].impact == ranked[i].impact) CHECK(ranked[i - 1].index < ranked[i].index);
  }
}

TEST_CASE("joint uncertainty costs at least the worst single arc") {
  GeneratorConfig cfg;
  cfg.n_clients = 3;
  const auto inst = generate_instances(cfg)[0];
  const double budget = 25.0;
  const auto ranked = rank_critical_arcs(inst.network, inst.clients, inst.costs, 1.0, budget, 2);
  REQUIRE(ranked.size() == 50);
  CHECK(ranked.front().impact > 0.0);

  DisruptionProfile nominal;
  nominal.budget = budget;
  const double base = solve_instance(inst.network, inst.clients, nominal, inst.costs).total.total;
  DisruptionProfile joint;
  joint.deviation_rate = 1.0;
  joint.budget = budget;
  for (std::size_t i = 0; i < 3; ++i) joint.uncertain_arcs.push_back(ranked[i].index);
  std::sort(joint.uncertain_arcs.begin(), joint.uncertain_arcs.end());
  const auto stressed = with_disruption(inst.network, joint);
  const double together = solve_instance(stressed, inst.clients, joint, inst.costs).total.total;
  CHECK(together - base >= ranked.front().impact - 1e-9);
}

TEST_CASE("tables, chart and metrics for the default sweep") {
  const auto& r = default_sweep();
  const auto dir = std::filesystem::temp_directory_path() / "rmsn_report_test";
  std::filesystem::remove_all(dir);
  const auto files = render_report(r, dir);
  REQUIRE(files.tables.size() == 3);
  int first = 1;
  for (int k : {1, 3, 5}) {
    const std::string table = read_text(dir / ("table_" + std::to_string(k) + "clients.csv"));
    CHECK(count_lines(table) == 16);
    CHECK(table.rfind("In.,|V|,PUV,0%,25%,50%,75%,100%,Mean time (s)\n", 0) == 0);
    CHECK(table.find("\n" + std::to_string(first) + ",50,0%,") != std::string::npos);
    first += 15;
  }
  const std::string svg = read_text(files.chart);
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg == render_chart_svg(r));
  CHECK(count_lines(read_text(files.metrics)) == 226);
  CHECK(count_lines(read_text(files.robustness)) == 10);
  std::filesystem::remove_all(dir);
}

TEST_CASE("empty results give header-only files") {
  SweepResults r;
  r.config.client_levels = {1};
  CHECK(render_table_csv(r, 1, 1) == "In.,|V|,PUV,0%,25%,50%,75%,100%,Mean time (s)\n");
  const auto m = resilience_metrics(r);
  CHECK(count_lines(render_metrics_csv(m)) == 1);
  CHECK(count_lines(render_robustness_csv(m)) == 1);
  CHECK(render_chart_svg(r) == render_chart_svg(r));
}

TEST_CASE("infeasible cells are rendered as such") {
  SweepResults r;
  r.config.rate_levels = {0.0};
  auto bad = cell(50, 1, 0.5, 0.0, 0.0);
  bad.status = CellStatus::infeasible;
  bad.infeasible_clients = {0};
  r.cells = {cell(50, 1, 0.0, 0.0, 100.0), bad};
  const std::string table = render_table_csv(r, 1, 1);
  CHECK(table.find("infeasible") != std::string::npos);
  CHECK(resilience_metrics(r).rows.size() == 1);
}

TEST_CASE("sweep configuration is validated") {
  SweepConfig cfg;
  cfg.puv_levels = {0.5, 0.25};
  CHECK_THROWS_AS(validate_sweep_config(cfg), InvalidInput);
  cfg = SweepConfig{};
  cfg.client_levels = {};
  CHECK_THROWS_AS(validate_sweep_config(cfg), InvalidInput);
  cfg = SweepConfig{};
  const auto back = sweep_config_from_json(to_json(cfg));
  CHECK(dump_json(to_json(back)) == dump_json(to_json(cfg)));
}
