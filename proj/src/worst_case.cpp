#include "rmsn/worst_case.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace rmsn {

namespace {

void check_inputs(std::span<const TimedArc> path, double budget) {
  if (path.empty()) throw InvalidInput("empty itinerary");
  if (!(budget >= 0.0)) throw InvalidInput("budget must be non-negative");
}

double nominal_sum(std::span<const TimedArc> path) {
  double total = 0.0;
  for (const auto& a : path) total += a.nominal_time;
  return total;
}

// Dual objective for a given lambda, excluding the nominal sum.
double dual_value(std::span<const TimedArc> path, double budget, double lambda) {
  double value = budget * lambda;
  for (const auto& a : path) value += std::max(a.max_deviation - lambda, 0.0);
  return value;
}

}  // namespace

std::vector<TimedArc> timed_path(const ServiceNetwork& net, const Path& path) {
  std::vector<TimedArc> out;
  out.reserve(path.size());
  for (ArcIndex k : path) {
    if (k >= net.service_arcs.size()) throw InvalidInput("service-arc index out of range");
    const auto& a = net.service_arcs[k];
    out.push_back({k, a.nominal_time, a.max_deviation});
  }
  return out;
}

double WorstCaseResult::u_sum() const {
  double total = 0.0;
  for (const auto& [k, u] : u_assignment) total += u;
  return total;
}

WorstCaseResult worst_case_delay(std::span<const TimedArc> path, double budget) {
  check_inputs(path, budget);

  std::vector<std::size_t> order(path.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (path[a].max_deviation != path[b].max_deviation) return path[a].max_deviation > path[b].max_deviation;
    return path[a].index < path[b].index;
  });

  WorstCaseResult result;
  double remaining = budget;
  for (std::size_t i : order) {
    if (remaining <= 0.0 || path[i].max_deviation <= 0.0) break;
    double u = std::min(1.0, remaining);
    remaining -= u;
    result.delay += u * path[i].max_deviation;
    result.u_assignment.emplace_back(path[i].index, u);
  }
  std::sort(result.u_assignment.begin(), result.u_assignment.end());
  result.total_time = nominal_sum(path) + result.delay;
  return result;
}

WorstCaseResult worst_case_delay(const ServiceNetwork& net, const Path& path, double budget) {
  auto arcs = timed_path(net, path);
  return worst_case_delay(arcs, budget);
}

double dual_lambda(std::span<const TimedArc> path, double budget) {
  check_inputs(path, budget);
  double best_lambda = 0.0;
  double best = dual_value(path, budget, 0.0);
  for (const auto& a : path) {
    double value = dual_value(path, budget, a.max_deviation);
    if (value < best || (value == best && a.max_deviation < best_lambda)) {
      best = value;
      best_lambda = a.max_deviation;
    }
  }
  return best_lambda;
}

double dual_path_time(std::span<const TimedArc> path, double budget) {
  double lambda = dual_lambda(path, budget);
  return nominal_sum(path) + dual_value(path, budget, lambda);
}

}  // namespace rmsn
