#include "rmsn/milp_enumerate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>

#include "rmsn/lp_simplex.hpp"

namespace rmsn::milp {

namespace {

constexpr double kIntegrality = 1e-7;

// Variables linked through any constraint form one block; blocks are solved
// independently since the objective is a plain sum.
std::vector<std::vector<std::size_t>> blocks_of(const MilpModel& model) {
  std::vector<std::size_t> parent(model.variables.size());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<std::size_t(std::size_t)> root = [&](std::size_t v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  for (const auto& c : model.constraints)
    for (std::size_t i = 1; i < c.terms.size(); ++i) parent[root(c.terms[i].var)] = root(c.terms[0].var);
  std::vector<std::vector<std::size_t>> groups(model.variables.size());
  for (std::size_t v = 0; v < model.variables.size(); ++v) groups[root(v)].push_back(v);
  std::erase_if(groups, [](const auto& g) { return g.empty(); });
  return groups;
}

class BlockSolver {
 public:
  BlockSolver(const MilpModel& model, std::vector<std::size_t> vars, std::size_t max_enumerated, EnumerationResult& stats)
      : model_(model), vars_(std::move(vars)), stats_(stats), cost_(model.variables.size(), 0.0) {
    for (const auto& t : model.objective) cost_[t.var] += t.coef;
    std::vector<bool> in_block(model.variables.size(), false);
    for (auto v : vars_) in_block[v] = true;
    for (std::size_t r = 0; r < model.constraints.size(); ++r) {
      const auto& c = model.constraints[r];
      if (c.terms.empty() || !in_block[c.terms[0].var]) continue;
      rows_.push_back(r);
    }

    std::vector<bool> enumerated(model.variables.size(), false);
    for (auto r : rows_) {
      const auto& c = model.constraints[r];
      if (c.sense != Sense::eq) continue;
      const bool all_binary = std::all_of(c.terms.begin(), c.terms.end(),
                                          [&](const Term& t) { return model.variables[t.var].kind == VarKind::binary; });
      if (!all_binary) continue;
      eq_rows_.push_back(r);
      for (const auto& t : c.terms) enumerated[t.var] = true;
    }
    for (auto v : vars_)
      if (enumerated[v]) enum_vars_.push_back(v);
    if (enum_vars_.size() > max_enumerated)
      throw InvalidInput("enumeration over " + std::to_string(enum_vars_.size()) + " binaries exceeds the limit of " +
                         std::to_string(max_enumerated));

    rows_of_var_.resize(model.variables.size());
    for (std::size_t e = 0; e < eq_rows_.size(); ++e)
      for (const auto& t : model.constraints[eq_rows_[e]].terms) rows_of_var_[t.var].push_back(e);
  }

  bool solve(std::vector<double>& values, double& objective) {
    lower_.assign(model_.variables.size(), 0.0);
    upper_.assign(model_.variables.size(), 0.0);
    for (auto v : vars_) {
      lower_[v] = model_.variables[v].lower;
      upper_[v] = model_.variables[v].upper;
    }
    partial_.assign(eq_rows_.size(), 0.0);
    slack_lo_.assign(eq_rows_.size(), 0.0);
    slack_hi_.assign(eq_rows_.size(), 0.0);
    for (std::size_t e = 0; e < eq_rows_.size(); ++e)
      for (const auto& t : model_.constraints[eq_rows_[e]].terms) (t.coef < 0 ? slack_lo_[e] : slack_hi_[e]) += t.coef;
    found_ = false;
    enumerate(0);
    if (!found_) return false;
    for (auto v : vars_) values[v] = best_values_[v];
    objective = best_objective_;
    return true;
  }

 private:
  void enumerate(std::size_t depth) {
    if (depth == enum_vars_.size()) {
      ++stats_.supports;
      branch_and_bound(lower_, upper_);
      return;
    }
    const std::size_t v = enum_vars_[depth];
    const double lo = std::ceil(model_.variables[v].lower - kIntegrality);
    const double hi = std::floor(model_.variables[v].upper + kIntegrality);
    for (double value = std::max(lo, 0.0); value <= std::min(hi, 1.0); value += 1.0) {
      if (!assign(v, value)) {
        unassign(v, value);
        continue;
      }
      lower_[v] = upper_[v] = value;
      enumerate(depth + 1);
      unassign(v, value);
    }
    lower_[v] = model_.variables[v].lower;
    upper_[v] = model_.variables[v].upper;
  }

  // Fixes v and reports whether every equality row can still be met by the
  // binaries not yet fixed.
  bool assign(std::size_t v, double value) {
    bool ok = true;
    for (auto e : rows_of_var_[v]) {
      const double coef = coefficient(eq_rows_[e], v);
      (coef < 0 ? slack_lo_[e] : slack_hi_[e]) -= coef;
      partial_[e] += coef * value;
      const double rhs = model_.constraints[eq_rows_[e]].rhs;
      if (partial_[e] + slack_lo_[e] > rhs + 1e-9 || partial_[e] + slack_hi_[e] < rhs - 1e-9) ok = false;
    }
    return ok;
  }

  void unassign(std::size_t v, double value) {
    for (auto e : rows_of_var_[v]) {
      const double coef = coefficient(eq_rows_[e], v);
      (coef < 0 ? slack_lo_[e] : slack_hi_[e]) += coef;
      partial_[e] -= coef * value;
    }
  }

  double coefficient(std::size_t row, std::size_t v) const {
    for (const auto& t : model_.constraints[row].terms)
      if (t.var == v) return t.coef;
    return 0.0;
  }

  void branch_and_bound(std::vector<double>& lower, std::vector<double>& upper) {
    std::vector<double> x;
    double objective = 0.0;
    if (!relaxation(lower, upper, x, objective)) return;
    if (found_ && objective >= best_objective_ - 1e-9) return;
    for (auto v : vars_) {
      if (model_.variables[v].kind != VarKind::binary) continue;
      const double frac = x[v] - std::floor(x[v]);
      if (frac <= kIntegrality || frac >= 1.0 - kIntegrality) continue;
      const double saved_lo = lower[v], saved_hi = upper[v];
      upper[v] = std::floor(x[v]);
      branch_and_bound(lower, upper);
      upper[v] = saved_hi;
      lower[v] = std::ceil(x[v]);
      branch_and_bound(lower, upper);
      lower[v] = saved_lo;
      return;
    }
    for (auto v : vars_)
      if (model_.variables[v].kind == VarKind::binary) x[v] = std::round(x[v]);
    found_ = true;
    best_objective_ = objective;
    best_values_ = std::move(x);
  }

  // LP over the block with fixed columns substituted out. Columns in no
  // remaining row sit at their cheapest bound.
  bool relaxation(const std::vector<double>& lower, const std::vector<double>& upper, std::vector<double>& x,
                  double& objective) {
    x.assign(model_.variables.size(), 0.0);
    std::vector<std::size_t> column(model_.variables.size(), SIZE_MAX);
    std::vector<std::size_t> free_vars;
    std::vector<bool> in_row(model_.variables.size(), false);
    for (auto r : rows_)
      for (const auto& t : model_.constraints[r].terms)
        if (lower[t.var] != upper[t.var]) in_row[t.var] = true;

    objective = 0.0;
    for (auto v : vars_) {
      if (lower[v] > upper[v]) return false;
      if (lower[v] == upper[v]) {
        x[v] = lower[v];
      } else if (!in_row[v]) {
        if (cost_[v] < 0 && !std::isfinite(upper[v])) throw InvalidInput("model is unbounded");
        x[v] = cost_[v] < 0 ? upper[v] : lower[v];
      } else {
        column[v] = free_vars.size();
        free_vars.push_back(v);
        continue;
      }
      objective += cost_[v] * x[v];
    }

    LpProblem lp;
    lp.columns = free_vars.size();
    for (auto v : free_vars) {
      lp.cost.push_back(cost_[v]);
      lp.lower.push_back(lower[v]);
      lp.upper.push_back(upper[v]);
    }
    for (auto r : rows_) {
      const auto& c = model_.constraints[r];
      LpRow row;
      row.sense = c.sense;
      row.rhs = c.rhs;
      for (const auto& t : c.terms) {
        if (column[t.var] == SIZE_MAX) row.rhs -= t.coef * x[t.var];
        else row.terms.push_back({column[t.var], t.coef});
      }
      if (row.terms.empty()) {
        const double tol = 1e-9 * std::max(1.0, std::abs(c.rhs));
        const bool ok = c.sense == Sense::eq ? std::abs(row.rhs) <= tol
                        : c.sense == Sense::le ? row.rhs >= -tol
                                               : row.rhs <= tol;
        if (!ok) return false;
        continue;
      }
      lp.rows.push_back(std::move(row));
    }
    if (lp.columns == 0) return true;
    ++stats_.lp_solves;
    const LpResult result = solve_lp(lp);
    if (result.status == LpStatus::unbounded) throw InvalidInput("model is unbounded");
    if (result.status != LpStatus::optimal) return false;
    for (std::size_t j = 0; j < free_vars.size(); ++j) x[free_vars[j]] = result.x[j];
    objective += result.objective;
    return true;
  }

  const MilpModel& model_;
  std::vector<std::size_t> vars_;
  EnumerationResult& stats_;
  std::vector<double> cost_;
  std::vector<std::size_t> rows_;
  std::vector<std::size_t> eq_rows_;
  std::vector<std::size_t> enum_vars_;
  std::vector<std::vector<std::size_t>> rows_of_var_;

  std::vector<double> lower_, upper_;
  std::vector<double> partial_, slack_lo_, slack_hi_;

  bool found_ = false;
  double best_objective_ = 0.0;
  std::vector<double> best_values_;
};

}  // namespace

EnumerationResult solve_by_enumeration(const MilpModel& model, std::size_t max_enumerated) {
  EnumerationResult result;
  result.values.assign(model.variables.size(), 0.0);
  double total = 0.0;
  for (auto& block : blocks_of(model)) {
    BlockSolver solver(model, std::move(block), max_enumerated, result);
    double objective = 0.0;
    if (!solver.solve(result.values, objective)) return result;
    total += objective;
  }
  result.feasible = true;
  result.objective = total;
  return result;
}

}  // namespace rmsn::milp
