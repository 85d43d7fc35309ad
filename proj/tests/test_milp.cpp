#include "doctest.h"
#include "support.hpp"

#include "rmsn/lp_simplex.hpp"
#include "rmsn/milp.hpp"
#include "rmsn/milp_enumerate.hpp"
#include "rmsn/path_solver.hpp"

using namespace rmsn;
using namespace rmsn::milp;

namespace {

std::size_t rows_with_prefix(const MilpModel& m, const std::string& prefix) {
  return static_cast<std::size_t>(std::count_if(m.constraints.begin(), m.constraints.end(),
                                                [&](const Constraint& c) { return c.name.rfind(prefix, 0) == 0; }));
}

}  // namespace

TEST_CASE("variable counts of the one-client two-arc model") {
  const auto inst = test::two_leg_instance();
  const auto m = build_model(inst.network, inst.clients, inst.disruption, inst.costs);
  // x 2, u 2, ux 2, theta 2, z 3*2*2, and w, lambda, k-, k+.
  CHECK(m.variables.size() == 24);
  CHECK(m.count(VarKind::binary) == 14);
  CHECK(m.count(VarKind::continuous) == 10);
  for (const char* name : {"x_c0_v0", "z_c0_i1_s0_s1", "w_c0", "u_c0_v1", "ux_c0_v0", "lam_c0", "th_c0_v1", "km_c0", "kp_c0"})
    CHECK(m.find(name).has_value());
  REQUIRE(m.clients.size() == 1);
  CHECK(m.clients[0].z.size() == 12);
  CHECK(m.arc_endpoints.size() == 2);
}

TEST_CASE("one flow row per intermediate node plus source and sink rows") {
  test::TinyOptions opt;
  opt.max_clients = 3;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto inst = test::random_tiny_instance(seed, opt);
    const auto m = build_model(inst.network, inst.clients, inst.disruption, inst.costs);
    std::size_t expected = 0;
    for (const auto& c : inst.clients)
      for (NodeId j : inst.network.nodes) {
        if (j == inst.network.origin || j == c.destination) continue;
        const bool touched = std::any_of(inst.network.service_arcs.begin(), inst.network.service_arcs.end(),
                                         [&](const ServiceArc& a) { return a.from == j || a.to == j; });
        if (touched) ++expected;
      }
    CHECK(rows_with_prefix(m, "flow_") == expected);
    CHECK(rows_with_prefix(m, "src_") == inst.clients.size());
    CHECK(rows_with_prefix(m, "dst_") == inst.clients.size());
    CHECK(rows_with_prefix(m, "budget_") == inst.clients.size());
  }
}

TEST_CASE("objective is evaluated at given values") {
  MilpModel m;
  const auto a = m.add_variable("a", VarKind::continuous, 0.0, kInfinity);
  const auto b = m.add_variable("b", VarKind::binary, 0.0, 1.0);
  m.objective = {{a, 2.0}, {b, -3.0}};
  CHECK(m.objective_value({1.5, 1.0}) == doctest::Approx(0.0));
  CHECK_THROWS(m.add_variable("a", VarKind::continuous, 0.0, 1.0));
}

TEST_CASE("constraints drop zero terms and merge repeats") {
  MilpModel m;
  const auto a = m.add_variable("a", VarKind::continuous, 0.0, kInfinity);
  const auto b = m.add_variable("b", VarKind::continuous, 0.0, kInfinity);
  m.add_constraint("r", {{a, 1.0}, {b, 0.0}, {a, 2.0}}, Sense::le, 4.0);
  REQUIRE(m.constraints.size() == 1);
  REQUIRE(m.constraints[0].terms.size() == 1);
  CHECK(m.constraints[0].terms[0].coef == 3.0);
}

TEST_CASE("simplex solves a small LP") {
  // min -x - y  s.t. x + 2y <= 4, 3x + y <= 6, x, y >= 0  -> x = 1.6, y = 1.2
  LpProblem p;
  p.columns = 2;
  p.cost = {-1.0, -1.0};
  p.lower = {0.0, 0.0};
  p.upper = {kInfinity, kInfinity};
  p.rows = {{{{0, 1.0}, {1, 2.0}}, Sense::le, 4.0}, {{{0, 3.0}, {1, 1.0}}, Sense::le, 6.0}};
  const auto r = solve_lp(p);
  REQUIRE(r.status == LpStatus::optimal);
  CHECK(r.objective == doctest::Approx(-2.8));
  CHECK(r.x[0] == doctest::Approx(1.6));
  CHECK(r.x[1] == doctest::Approx(1.2));
}

TEST_CASE("simplex reports infeasible and unbounded problems") {
  LpProblem p;
  p.columns = 1;
  p.cost = {1.0};
  p.lower = {0.0};
  p.upper = {1.0};
  p.rows = {{{{0, 1.0}}, Sense::ge, 2.0}};
  CHECK(solve_lp(p).status == LpStatus::infeasible);
  p.cost = {-1.0};
  p.upper = {kInfinity};
  p.rows = {{{{0, 1.0}}, Sense::ge, 0.0}};
  CHECK(solve_lp(p).status == LpStatus::unbounded);
}

TEST_CASE("enumeration finds the path-solver optimum on the two-leg instance") {
  auto inst = test::two_leg_instance();
  inst.network.service_arcs[0].max_deviation = 5.0;
  inst.network.service_arcs[1].max_deviation = 4.0;
  inst.disruption.uncertain_arcs = {0, 1};
  inst.disruption.budget = 1.5;
  const auto m = build_model(inst.network, inst.clients, inst.disruption, inst.costs);
  const auto r = solve_by_enumeration(m);
  REQUIRE(r.feasible);
  const auto sol = solve_instance(inst.network, inst.clients, inst.disruption, inst.costs);
  CHECK(r.objective == doctest::Approx(sol.total.total).epsilon(1e-6));
  CHECK(r.values[*m.find("x_c0_v0")] == doctest::Approx(1.0));
  CHECK(r.values[*m.find("z_c0_i1_s0_s1")] == doctest::Approx(1.0));
}

TEST_CASE("zero budget model equals the nominal deterministic model") {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    test::TinyOptions opt;
    opt.max_nodes = 5;
    opt.max_service_arcs = 8;
    auto inst = test::random_tiny_instance(seed, opt);
    inst.disruption.budget = 0.0;
    auto flat = inst.network;
    for (auto& a : flat.service_arcs) a.max_deviation = 0.0;
    const auto robust = solve_by_enumeration(build_model(inst.network, inst.clients, inst.disruption, inst.costs));
    const auto nominal = solve_by_enumeration(build_model(flat, inst.clients, DisruptionProfile{}, inst.costs));
    REQUIRE(robust.feasible == nominal.feasible);
    if (robust.feasible) CHECK(robust.objective == doctest::Approx(nominal.objective).epsilon(1e-9));
  }
}

TEST_CASE("enumeration agrees with the path solver on random tiny instances") {
  test::TinyOptions opt;
  opt.max_nodes = 5;
  opt.max_service_arcs = 8;
  opt.max_clients = 2;
  for (std::uint64_t seed = 30; seed < 45; ++seed) {
    auto inst = test::random_tiny_instance(seed, opt);
    inst.disruption.budget = 1.5;
    const auto r = solve_by_enumeration(build_model(inst.network, inst.clients, inst.disruption, inst.costs));
    try {
      const auto sol = solve_instance(inst.network, inst.clients, inst.disruption, inst.costs);
      REQUIRE(r.feasible);
      CHECK(r.objective == doctest::Approx(sol.total.total).epsilon(1e-6));
    } catch (const Infeasible&) {
      CHECK_FALSE(r.feasible);
    }
  }
}

TEST_CASE("enumeration refuses oversized models") {
  test::TinyOptions opt;
  opt.min_nodes = 8;
  opt.max_service_arcs = 20;
  auto inst = test::random_tiny_instance(3, opt);
  const auto m = build_model(inst.network, inst.clients, inst.disruption, inst.costs);
  CHECK_THROWS_AS(solve_by_enumeration(m, 2), InvalidInput);
}
