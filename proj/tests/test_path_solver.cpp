#include <cmath>

#include "doctest.h"
#include "support.hpp"

#include "rmsn/path_solver.hpp"

using namespace rmsn;

namespace {

struct Direct {
  ServiceNetwork net;
  ClientOrder order{0, 1, 2.0, 10.0};
  CostParams costs;
  DisruptionProfile profile;

  Direct() {
    net.nodes = {0, 1};
    net.arcs = {{0, 1, 1000.0}};
    net.services = {{0, Mode::rail, {0, 1}}};
    net.service_arcs = {{0, 0, 1, 10.0, 0.0, 100.0}};
    costs.product_value = 100.0;
    costs.degradation_rate_per_day = 0.1;
  }
};

// Water is cheap and slow, air is fast and dear. Water misses the shelf life
// only under deviation.
Instance water_or_air(double budget) {
  Instance inst;
  auto& net = inst.network;
  net.nodes = {0, 1};
  net.arcs = {{0, 1, 1000.0}};
  net.services = {{0, Mode::water, {0, 1}}, {1, Mode::air, {0, 1}}};
  net.service_arcs = {{0, 0, 1, 20.0, 15.0, 1.0}, {1, 0, 1, 1.0, 0.0, 50.0}};
  inst.clients = {{0, 1, 1.0, 30.0}};
  inst.disruption.uncertain_arcs = {0};
  inst.disruption.budget = budget;
  return inst;
}

double timing_total(double w, double worst, const ClientOrder& o, const CostParams& c) {
  const double a = w + worst;
  return c.degradation_per_day() * a + c.early_penalty_per_day * std::max(o.due_date - a, 0.0) +
         c.late_penalty_per_day * std::max(a - o.due_date, 0.0);
}

}  // namespace

TEST_CASE("direct arc on time costs transport plus degradation") {
  Direct d;
  const auto c = evaluate_itinerary(d.net, d.order, {0}, 0.0, d.profile, d.costs);
  CHECK(c.transport == doctest::Approx(200.0));
  CHECK(c.degradation == doctest::Approx(200.0));
  CHECK(c.earliness_penalty == 0.0);
  CHECK(c.lateness_penalty == 0.0);
  CHECK(c.total == doctest::Approx(400.0));
}

TEST_CASE("early arrival adds the earliness penalty") {
  Direct d;
  d.order.due_date = 15.0;
  const auto c = evaluate_itinerary(d.net, d.order, {0}, 0.0, d.profile, d.costs);
  CHECK(c.earliness_penalty == doctest::Approx(150.0));
  CHECK(c.total == doctest::Approx(550.0));
}

TEST_CASE("two-arc path under a fractional budget") {
  auto inst = test::two_leg_instance();
  inst.network.service_arcs[0].max_deviation = 5.0;
  inst.network.service_arcs[1].max_deviation = 4.0;
  inst.disruption.uncertain_arcs = {0, 1};
  inst.disruption.budget = 1.5;
  const auto& order = inst.clients[0];
  const auto wc = worst_case_delay(inst.network, {0, 1}, 1.5);
  CHECK(wc.total_time == doctest::Approx(10.0 + 7.0));

  const auto c = evaluate_itinerary(inst.network, order, {0, 1}, 0.0, inst.disruption, inst.costs);
  CHECK(c.transport == doctest::Approx(3.0 * 50.0));
  CHECK(c.transshipment == doctest::Approx(3.0 * 12.0));
  CHECK(c.degradation == doctest::Approx(3.0 * 10.0 * 17.0));
  CHECK(c.lateness_penalty == doctest::Approx(20.0 * 3.0 * 5.0));
  CHECK(c.total == doctest::Approx(150.0 + 36.0 + 510.0 + 300.0));
}

TEST_CASE("arrival after the shelf life is rejected") {
  Direct d;
  CHECK_THROWS_AS(evaluate_itinerary(d.net, d.order, {0}, 25.0, d.profile, d.costs), InfeasibleItinerary);
  CHECK_THROWS_AS(evaluate_itinerary(d.net, d.order, {0}, -1.0, d.profile, d.costs), InvalidInput);
}

TEST_CASE("optimal outbound day") {
  CostParams c;
  ClientOrder o{0, 1, 1.0, 25.0};
  CHECK(optimal_outbound(20.0, o, c) == doctest::Approx(5.0));
  CHECK(optimal_outbound(27.0, o, c) == 0.0);
  c.degradation_rate_per_day = 0.2;
  CHECK(optimal_outbound(20.0, o, c) == 0.0);
  c.degradation_rate_per_day = 0.1;
  c.shelf_life = 22.0;
  CHECK(optimal_outbound(20.0, o, c) == doctest::Approx(2.0));
}

TEST_CASE("optimal outbound beats every grid point") {
  Rng rng(3, "outbound");
  for (int trial = 0; trial < 50; ++trial) {
    CostParams c;
    c.degradation_rate_per_day = rng.uniform(0.0, 0.3);
    c.early_penalty_per_day = rng.uniform(0.0, 30.0);
    c.late_penalty_per_day = rng.uniform(0.0, 30.0);
    const ClientOrder o{0, 1, 1.0, rng.uniform(1.0, 30.0)};
    const double worst = rng.uniform(0.0, 30.0);
    const double w = optimal_outbound(worst, o, c);
    const double best = timing_total(w, worst, o, c);
    for (double g = 0.0; g <= c.shelf_life - worst; g += 1e-2)
      CHECK(best <= timing_total(g, worst, o, c) + 1e-9);
  }
}

TEST_CASE("single available path is returned") {
  auto inst = test::two_leg_instance();
  const auto it = solve_client(inst.network, inst.clients[0], inst.disruption, inst.costs);
  CHECK(it.path == Path{0, 1});
  CHECK(it.outbound_day == doctest::Approx(2.0));
  CHECK(it.arrival_day() == doctest::Approx(12.0));
}

TEST_CASE("deviation pushes the choice to the fast route") {
  const auto nominal = water_or_air(0.0);
  auto it = solve_client(nominal.network, nominal.clients[0], nominal.disruption, nominal.costs);
  CHECK(it.path == Path{0});
  const auto robust = water_or_air(1.0);
  it = solve_client(robust.network, robust.clients[0], robust.disruption, robust.costs);
  CHECK(it.path == Path{1});
  CHECK(it.costs.total == doctest::Approx(350.0));
}

TEST_CASE("zero budget equals the deterministic optimum") {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    auto inst = test::random_tiny_instance(seed);
    inst.disruption.budget = 0.0;
    auto flat = inst.network;
    for (auto& a : flat.service_arcs) a.max_deviation = 0.0;
    const auto& o = inst.clients[0];
    const auto a = solve_client(inst.network, o, inst.disruption, inst.costs);
    const auto b = solve_client(flat, o, DisruptionProfile{}, inst.costs);
    CHECK(a.path == b.path);
    CHECK(a.costs.total == doctest::Approx(b.costs.total));
  }
}

TEST_CASE("solver matches the oracle on random instances") {
  for (std::uint64_t seed = 100; seed < 160; ++seed) {
    auto inst = test::random_tiny_instance(seed);
    for (double budget : {0.0, 1.0, 2.5}) {
      inst.disruption.budget = budget;
      const auto& o = inst.clients[0];
      std::optional<RobustItinerary> fast, slow;
      try {
        fast = solve_client(inst.network, o, inst.disruption, inst.costs);
      } catch (const Infeasible&) {
      }
      try {
        slow = brute_force_oracle(inst.network, o, inst.disruption, inst.costs);
      } catch (const Infeasible&) {
      }
      REQUIRE(fast.has_value() == slow.has_value());
      if (!fast) continue;
      CHECK(fast->costs.total == doctest::Approx(slow->costs.total).epsilon(1e-6));
      CHECK(fast->path == slow->path);
    }
  }
}

TEST_CASE("no feasible path raises the same error in solver and oracle") {
  auto inst = water_or_air(1.0);
  inst.network.service_arcs.pop_back();
  inst.network.services.pop_back();
  const auto& o = inst.clients[0];
  CHECK_THROWS_AS(solve_client(inst.network, o, inst.disruption, inst.costs), Infeasible);
  CHECK_THROWS_AS(brute_force_oracle(inst.network, o, inst.disruption, inst.costs), Infeasible);
  try {
    solve_instance(inst.network, inst.clients, inst.disruption, inst.costs);
    FAIL("expected infeasibility");
  } catch (const Infeasible& e) {
    CHECK(e.clients() == std::vector<ClientId>{0});
  }
}

TEST_CASE("large budget saturates every deviation") {
  auto inst = test::random_tiny_instance(5);
  inst.disruption.budget = 100.0;
  const auto it = solve_client(inst.network, inst.clients[0], inst.disruption, inst.costs);
  double full = 0.0;
  for (ArcIndex a : it.path) full += inst.network.service_arcs[a].nominal_time + inst.network.service_arcs[a].max_deviation;
  CHECK(it.worst_case.total_time == doctest::Approx(full));
}

TEST_CASE("instance total is the sum of independent clients") {
  test::TinyOptions opt;
  opt.max_clients = 3;
  for (std::uint64_t seed = 1; seed <= 15; ++seed) {
    auto inst = test::random_tiny_instance(seed, opt);
    inst.disruption.budget = 1.0;
    InstanceSolution sol;
    try {
      sol = solve_instance(inst.network, inst.clients, inst.disruption, inst.costs, {.workers = 3});
    } catch (const Infeasible&) {
      continue;
    }
    double sum = 0.0;
    for (const auto& o : inst.clients) sum += solve_client(inst.network, o, inst.disruption, inst.costs).costs.total;
    CHECK(sol.total.total == doctest::Approx(sum));
    REQUIRE(sol.itineraries.size() == inst.clients.size());
    for (std::size_t i = 0; i < inst.clients.size(); ++i) CHECK(sol.itineraries[i].client == inst.clients[i].id);
  }
}

TEST_CASE("budget increase never lowers the optimum") {
  for (std::uint64_t seed = 200; seed < 230; ++seed) {
    auto inst = test::random_tiny_instance(seed);
    double previous = -1.0;
    for (double budget : {0.0, 0.5, 1.0, 2.0, 4.0}) {
      inst.disruption.budget = budget;
      try {
        const double t = solve_client(inst.network, inst.clients[0], inst.disruption, inst.costs).costs.total;
        CHECK(t >= previous - 1e-9);
        previous = t;
      } catch (const Infeasible&) {
        previous = INFINITY;
      }
    }
  }
}
