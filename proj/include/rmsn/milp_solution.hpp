#pragma once

// Reading MILP solutions back into itineraries and checking them against the
// model semantics without going through the dual variables.

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rmsn/milp.hpp"
#include "rmsn/path_solver.hpp"

namespace rmsn::milp {

struct ClientAssignment {
  ClientId client = 0;
  Path path;
  double outbound_day = 0.0;
  /// Deviation degrees with non-zero value, ascending by service-arc index.
  std::vector<std::pair<ArcIndex, double>> u;
  double k_early = 0.0;
  double k_late = 0.0;
};

struct SolutionAssignments {
  std::vector<ClientAssignment> clients;
  /// From a `# Objective value = v` comment, or the model objective at the parsed values.
  std::optional<double> claimed_objective;
  std::vector<std::string> warnings;
};

/// `name value` per line; blank lines and lines starting with `#` are skipped
/// except for an objective comment. Variables that are not listed are zero.
/// Requires a model from build_model. Throws InvalidInput on unknown names,
/// malformed lines, or x values that do not form an origin-destination path.
SolutionAssignments parse_solution(const MilpModel& model, std::string_view text);

/// Assignments equivalent to a path-solver result, with the worst-case u.
SolutionAssignments assignments_from(const InstanceSolution& solution, const std::vector<ClientOrder>& orders);

/// Values of every model variable realizing `solution`, in `name value` form
/// with an objective comment. Dual variables come from the smallest
/// minimizing lambda.
std::string solution_text(const MilpModel& model, const ServiceNetwork& net, const std::vector<ClientOrder>& orders,
                          const InstanceSolution& solution, const DisruptionProfile& profile);

struct ClientCheck {
  ClientId client = 0;
  double worst_time = 0.0;
  double recomputed_total = 0.0;
};

struct VerificationReport {
  std::vector<Finding> findings;
  std::vector<ClientCheck> clients;
  double recomputed_objective = 0.0;
  std::optional<double> claimed_objective;

  bool clean() const { return findings.empty(); }
  bool has(std::string_view code) const;
  std::string summary() const;
};

/// Objective gap above this fraction of max(1, |objective|) is a finding.
inline constexpr double kObjectiveGap = 1e-6;

VerificationReport verify_solution(const ServiceNetwork& net, const std::vector<ClientOrder>& orders,
                                   const DisruptionProfile& profile, const CostParams& costs,
                                   const SolutionAssignments& assignments);

}  // namespace rmsn::milp
