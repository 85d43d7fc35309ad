#pragma once

// CPLEX LP text format: Minimize / Subject To / Bounds / Binaries / End.

#include <string>
#include <string_view>

#include "rmsn/milp.hpp"

namespace rmsn::milp {

/// Variables and the terms of every expression are written in name order,
/// constraints in insertion order, numbers with 12 significant digits.
std::string emit_lp(const MilpModel& model);

/// Reads the subset of the LP format produced by emit_lp, plus comments,
/// unnamed rows, `free` bounds and the usual section-name aliases. Only
/// minimization with binary or continuous variables is supported.
MilpModel parse_lp(std::string_view text);

class LpParseError : public InvalidInput {
 public:
  LpParseError(std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace rmsn::milp
