#pragma once

// Exact robust itinerary planning. The objective is a sum over clients with
// no coupling between them, so each client is solved on its own: enumerate
// node-simple service-arc paths, price each path under its worst-case
// scenario, and choose the best outbound day for it.

#include <string>
#include <vector>

#include "rmsn/model.hpp"
#include "rmsn/worst_case.hpp"

namespace rmsn {

struct CostBreakdown {
  double transport = 0.0;
  double transshipment = 0.0;
  double degradation = 0.0;
  double earliness_penalty = 0.0;
  double lateness_penalty = 0.0;
  double total = 0.0;

  CostBreakdown& operator+=(const CostBreakdown& other);
};

struct RobustItinerary {
  ClientId client = 0;
  Path path;
  double outbound_day = 0.0;
  WorstCaseResult worst_case;
  CostBreakdown costs;

  double arrival_day() const { return outbound_day + worst_case.total_time; }
};

struct InstanceSolution {
  std::vector<RobustItinerary> itineraries;
  CostBreakdown total;
};

/// Raised when one or more clients have no itinerary within the shelf life.
class Infeasible : public Error {
 public:
  Infeasible(std::vector<ClientId> clients, const std::string& what);
  const std::vector<ClientId>& clients() const { return clients_; }

 private:
  std::vector<ClientId> clients_;
};

/// Raised by evaluate_itinerary when the worst-case arrival exceeds the shelf life.
class InfeasibleItinerary : public Error {
 public:
  using Error::Error;
};

/// Costs of a fixed path and outbound day under the arrival-maximizing
/// scenario. The same scenario drives degradation and both penalties.
CostBreakdown evaluate_itinerary(const ServiceNetwork& net, const ClientOrder& order, const Path& path, double outbound_day,
                                 const DisruptionProfile& profile, const CostParams& costs);

/// Exact minimizer of the outbound-day dependent cost for a worst-case
/// travel time: degradation, earliness and lateness. Ties go to the smaller day.
double optimal_outbound(double worst_time, const ClientOrder& order, const CostParams& costs);

struct SolveOptions {
  /// Clients solved in parallel by solve_instance. 0 or 1 means sequential.
  unsigned workers = 1;
};

RobustItinerary solve_client(const ServiceNetwork& net, const ClientOrder& order, const DisruptionProfile& profile,
                             const CostParams& costs);

/// Same as above with a prebuilt search graph for `net` and `costs`.
RobustItinerary solve_client(const ServiceNetwork& net, const ExpandedGraph& graph, const ClientOrder& order,
                             const DisruptionProfile& profile, const CostParams& costs);

InstanceSolution solve_instance(const ServiceNetwork& net, const std::vector<ClientOrder>& orders,
                                const DisruptionProfile& profile, const CostParams& costs, const SolveOptions& options = {});

/// Largest network accepted by brute_force_oracle.
inline constexpr std::size_t kOracleMaxNodes = 10;

/// Exhaustive reference solver: every node-simple path, worst case by
/// enumerating the vertices of the budget polytope on a 1e-3 grid, outbound
/// day by comparing the breakpoints of the cost function. No pruning.
RobustItinerary brute_force_oracle(const ServiceNetwork& net, const ClientOrder& order, const DisruptionProfile& profile,
                                   const CostParams& costs);

}  // namespace rmsn
