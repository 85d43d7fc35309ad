#pragma once

// Exact solver for tiny MILPs by enumerating binary supports.
//
// The enumerated binaries are those appearing in equality rows made only of
// binaries (the routing variables). Every assignment satisfying the rows over
// enumerated variables alone is completed by an LP over the remaining
// variables; remaining binaries are relaxed and branched on if fractional.

#include <cstddef>
#include <vector>

#include "rmsn/milp.hpp"

namespace rmsn::milp {

struct EnumerationResult {
  bool feasible = false;
  double objective = 0.0;
  std::vector<double> values;
  std::size_t supports = 0;   // assignments that reached the LP stage
  std::size_t lp_solves = 0;
};

/// Throws InvalidInput when more than `max_enumerated` binaries would be enumerated.
EnumerationResult solve_by_enumeration(const MilpModel& model, std::size_t max_enumerated = 40);

}  // namespace rmsn::milp
