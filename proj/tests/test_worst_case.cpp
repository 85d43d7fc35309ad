#include <vector>

#include "doctest.h"
#include "rmsn/rng.hpp"
#include "rmsn/worst_case.hpp"

using namespace rmsn;

namespace {

std::vector<TimedArc> arcs(const std::vector<double>& deviations, double nominal = 1.0) {
  std::vector<TimedArc> out;
  for (std::size_t i = 0; i < deviations.size(); ++i) out.push_back({i, nominal, deviations[i]});
  return out;
}

double u_of(const WorstCaseResult& r, ArcIndex k) {
  for (const auto& [idx, u] : r.u_assignment)
    if (idx == k) return u;
  return 0.0;
}

// Grid search over u in steps of 1/steps per arc.
double grid_delay(const std::vector<TimedArc>& path, double budget, int steps) {
  double best = 0.0;
  std::vector<int> u(path.size(), 0);
  while (true) {
    double used = 0.0, delay = 0.0;
    for (std::size_t i = 0; i < path.size(); ++i) {
      used += static_cast<double>(u[i]) / steps;
      delay += path[i].max_deviation * u[i] / steps;
    }
    if (used <= budget + 1e-12) best = std::max(best, delay);
    std::size_t i = 0;
    while (i < u.size() && u[i] == steps) u[i++] = 0;
    if (i == u.size()) break;
    ++u[i];
  }
  return best;
}

}  // namespace

TEST_CASE("greedy fill with integral budget") {
  const auto p = arcs({5, 4, 3});
  const auto r = worst_case_delay(p, 2.0);
  CHECK(r.delay == doctest::Approx(9.0));
  CHECK(r.total_time == doctest::Approx(12.0));
  CHECK(u_of(r, 0) == 1.0);
  CHECK(u_of(r, 1) == 1.0);
  CHECK(u_of(r, 2) == 0.0);
  CHECK(r.u_sum() == doctest::Approx(2.0));
}

TEST_CASE("greedy fill with fractional budget") {
  const auto r = worst_case_delay(arcs({5, 4, 3}), 2.5);
  CHECK(r.delay == doctest::Approx(10.5));
  CHECK(u_of(r, 2) == doctest::Approx(0.5));
}

TEST_CASE("zero budget means nominal time") {
  const auto r = worst_case_delay(arcs({5, 4, 3}, 2.0), 0.0);
  CHECK(r.delay == 0.0);
  CHECK(r.total_time == doctest::Approx(6.0));
  CHECK(r.u_assignment.empty());
}

TEST_CASE("budget beyond path length saturates every arc") {
  const auto r = worst_case_delay(arcs({5, 4, 3}), 10.0);
  CHECK(r.delay == doctest::Approx(12.0));
  CHECK(r.u_sum() == doctest::Approx(3.0));
}

TEST_CASE("ties are filled in ascending index order") {
  const auto r = worst_case_delay(arcs({2, 2, 2}), 1.5);
  CHECK(u_of(r, 0) == 1.0);
  CHECK(u_of(r, 1) == 0.5);
  CHECK(u_of(r, 2) == 0.0);
}

TEST_CASE("greedy agrees with a grid search") {
  Rng rng(7, "grid");
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<double> dev;
    const auto n = rng.integer(1, 3);
    for (int i = 0; i < n; ++i) dev.push_back(static_cast<double>(rng.integer(0, 6)));
    const double budget = static_cast<double>(rng.integer(0, 8)) / 2.0;
    const auto p = arcs(dev);
    CHECK(worst_case_delay(p, budget).delay == doctest::Approx(grid_delay(p, budget, 4)));
  }
}

TEST_CASE("dual matches the primal on the worked example") {
  const auto p = arcs({5, 4, 3});
  CHECK(dual_path_time(p, 2.0) == doctest::Approx(3.0 + 9.0));
  CHECK(dual_lambda(p, 2.0) == doctest::Approx(3.0));
  CHECK(dual_path_time(p, 0.0) == doctest::Approx(3.0));
}

TEST_CASE("dual equals nominal plus worst-case delay on random paths") {
  Rng rng(11, "dual");
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<TimedArc> p;
    const auto n = rng.integer(1, 8);
    for (int i = 0; i < n; ++i) p.push_back({static_cast<ArcIndex>(i), rng.uniform(0.1, 10), rng.uniform(0, 10)});
    const double budget = rng.uniform(0.0, 9.0);
    const double primal = worst_case_delay(p, budget).total_time;
    CHECK(dual_path_time(p, budget) == doctest::Approx(primal).epsilon(1e-9));
  }
}

TEST_CASE("timed_path reads the network arcs") {
  ServiceNetwork net;
  net.service_arcs = {{0, 0, 1, 2.0, 1.0, 5.0}, {0, 1, 2, 3.0, 0.5, 5.0}};
  const auto p = timed_path(net, {1, 0});
  REQUIRE(p.size() == 2);
  CHECK(p[0].index == 1);
  CHECK(p[0].nominal_time == 3.0);
  CHECK(p[1].max_deviation == 1.0);
  CHECK(worst_case_delay(net, {0, 1}, 1.0).delay == doctest::Approx(1.0));
}
