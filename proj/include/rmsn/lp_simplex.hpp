#pragma once

// Dense two-phase primal simplex with Bland's rule. Meant for the small LPs
// left after fixing the binary support of a tiny MILP, not for large models.

#include <cstddef>
#include <vector>

#include "rmsn/milp.hpp"

namespace rmsn::milp {

struct LpRow {
  std::vector<Term> terms;
  Sense sense = Sense::le;
  double rhs = 0.0;
};

struct LpProblem {
  std::size_t columns = 0;
  std::vector<double> cost;   // minimized
  std::vector<double> lower;  // finite
  std::vector<double> upper;  // may be +inf
  std::vector<LpRow> rows;
};

enum class LpStatus { optimal, infeasible, unbounded };

struct LpResult {
  LpStatus status = LpStatus::infeasible;
  double objective = 0.0;
  std::vector<double> x;
};

LpResult solve_lp(const LpProblem& problem);

}  // namespace rmsn::milp
