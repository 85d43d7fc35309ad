#pragma once

// Budgeted worst-case travel time of a fixed itinerary.
//
// The adversary picks u in [0,1] per service-arc with sum(u) <= budget and
// delays each arc by u * max_deviation. For a fixed path the optimum is the
// greedy fill in descending deviation order; the LP dual gives the same value
// as min over lambda of budget*lambda + sum(max(dev - lambda, 0)).

#include <span>
#include <utility>
#include <vector>

#include "rmsn/model.hpp"

namespace rmsn {

/// A service-arc on a path, reduced to what the worst case needs.
struct TimedArc {
  ArcIndex index = 0;
  double nominal_time = 0.0;
  double max_deviation = 0.0;
};

std::vector<TimedArc> timed_path(const ServiceNetwork& net, const Path& path);

struct WorstCaseResult {
  double total_time = 0.0;  // nominal sum plus delay, days
  double delay = 0.0;       // days
  /// Non-zero deviation degrees only, ascending by service-arc index.
  std::vector<std::pair<ArcIndex, double>> u_assignment;

  double u_sum() const;
};

/// Ties in deviation are filled in ascending service-arc index order.
WorstCaseResult worst_case_delay(std::span<const TimedArc> path, double budget);
WorstCaseResult worst_case_delay(const ServiceNetwork& net, const Path& path, double budget);

/// Nominal time plus the dual minimum over lambda in {0} ∪ {deviations}.
double dual_path_time(std::span<const TimedArc> path, double budget);

/// The minimizing lambda of the dual; the smallest one among ties.
double dual_lambda(std::span<const TimedArc> path, double budget);

}  // namespace rmsn
