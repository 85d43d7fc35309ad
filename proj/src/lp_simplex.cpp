#include "rmsn/lp_simplex.hpp"

#include <cmath>
#include <limits>

namespace rmsn::milp {

namespace {

constexpr double kEps = 1e-9;
constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

// Tableau over equality rows T x = b with x >= 0; the last column holds b.
class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_((rows + 1) * (cols + 1), 0.0), basis_(rows, kNone) {}

  double& at(std::size_t r, std::size_t c) { return data_[r * (cols_ + 1) + c]; }
  double& rhs(std::size_t r) { return at(r, cols_); }
  // Objective row holds reduced costs; its rhs is minus the objective value.
  double& obj(std::size_t c) { return at(rows_, c); }
  std::size_t& basis(std::size_t r) { return basis_[r]; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  void pivot(std::size_t r, std::size_t c) {
    const double p = at(r, c);
    for (std::size_t j = 0; j <= cols_; ++j) at(r, j) /= p;
    for (std::size_t i = 0; i <= rows_; ++i) {
      if (i == r) continue;
      const double f = at(i, c);
      if (f == 0.0) continue;
      for (std::size_t j = 0; j <= cols_; ++j) at(i, j) -= f * at(r, j);
      at(i, c) = 0.0;
    }
    basis_[r] = c;
  }

  // Runs Bland's rule over columns [0, allowed). Returns false when unbounded.
  bool optimize(std::size_t allowed) {
    for (;;) {
      std::size_t enter = kNone;
      for (std::size_t c = 0; c < allowed; ++c)
        if (obj(c) < -kEps) {
          enter = c;
          break;
        }
      if (enter == kNone) return true;
      std::size_t leave = kNone;
      double best = 0.0;
      for (std::size_t r = 0; r < rows_; ++r) {
        const double a = at(r, enter);
        if (a <= kEps) continue;
        const double ratio = rhs(r) / a;
        if (leave == kNone || ratio < best - kEps || (std::abs(ratio - best) <= kEps && basis_[r] < basis_[leave])) {
          leave = r;
          best = ratio;
        }
      }
      if (leave == kNone) return false;
      pivot(leave, enter);
    }
  }

 private:
  std::size_t rows_, cols_;
  std::vector<double> data_;
  std::vector<std::size_t> basis_;
};

}  // namespace

LpResult solve_lp(const LpProblem& problem) {
  const std::size_t n = problem.columns;

  // Shift x = lower + y, y >= 0; finite upper bounds become rows.
  struct Row {
    std::vector<Term> terms;
    Sense sense;
    double rhs;
  };
  std::vector<Row> rows;
  double constant = 0.0;
  for (std::size_t j = 0; j < n; ++j) constant += problem.cost[j] * problem.lower[j];
  for (const auto& r : problem.rows) {
    double rhs = r.rhs;
    for (const auto& t : r.terms) rhs -= t.coef * problem.lower[t.var];
    rows.push_back({r.terms, r.sense, rhs});
  }
  for (std::size_t j = 0; j < n; ++j)
    if (std::isfinite(problem.upper[j])) rows.push_back({{{j, 1.0}}, Sense::le, problem.upper[j] - problem.lower[j]});

  // Columns: structural, one slack per inequality, one artificial per row that needs it.
  const std::size_t m = rows.size();
  std::vector<std::size_t> slack(m, kNone);
  std::size_t cols = n;
  for (std::size_t i = 0; i < m; ++i)
    if (rows[i].sense != Sense::eq) slack[i] = cols++;
  const std::size_t first_artificial = cols;
  // A row whose slack enters with +1 after sign normalization starts with the
  // slack basic; every other row gets an artificial.
  std::vector<std::size_t> artificial(m, kNone);
  std::vector<double> flip(m, 1.0);
  for (std::size_t i = 0; i < m; ++i) {
    if (rows[i].sense == Sense::le && rows[i].rhs >= 0.0) continue;
    if (rows[i].sense == Sense::ge && rows[i].rhs <= 0.0) {
      flip[i] = -1.0;
      continue;
    }
    flip[i] = rows[i].rhs < 0.0 ? -1.0 : 1.0;
    artificial[i] = cols++;
  }

  Tableau tab(m, cols);
  for (std::size_t i = 0; i < m; ++i) {
    const double f = flip[i];
    for (const auto& t : rows[i].terms) tab.at(i, t.var) += f * t.coef;
    if (slack[i] != kNone) tab.at(i, slack[i]) = f * (rows[i].sense == Sense::le ? 1.0 : -1.0);
    tab.rhs(i) = f * rows[i].rhs;
    if (artificial[i] != kNone) {
      tab.at(i, artificial[i]) = 1.0;
      tab.basis(i) = artificial[i];
    } else {
      tab.basis(i) = slack[i];
    }
  }

  LpResult result;
  // Phase 1: minimize the sum of artificials.
  if (cols > first_artificial) {
    for (std::size_t c = 0; c <= cols; ++c) tab.obj(c) = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (artificial[i] == kNone) continue;
      for (std::size_t c = 0; c <= cols; ++c) tab.obj(c) -= tab.at(i, c);
      tab.obj(artificial[i]) = 0.0;
    }
    tab.optimize(cols);
    if (-tab.obj(cols) > 1e-7) return result;
    // Drive zero-level artificials out of the basis where possible.
    for (std::size_t i = 0; i < m; ++i) {
      if (tab.basis(i) < first_artificial) continue;
      for (std::size_t c = 0; c < first_artificial; ++c)
        if (std::abs(tab.at(i, c)) > kEps) {
          tab.pivot(i, c);
          break;
        }
    }
  }

  // Phase 2 over structural and slack columns.
  for (std::size_t c = 0; c <= cols; ++c) tab.obj(c) = 0.0;
  for (std::size_t j = 0; j < n; ++j) tab.obj(j) = problem.cost[j];
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t b = tab.basis(i);
    const double cb = b < n ? problem.cost[b] : 0.0;
    if (cb == 0.0) continue;
    for (std::size_t c = 0; c <= cols; ++c) tab.obj(c) -= cb * tab.at(i, c);
  }
  if (!tab.optimize(first_artificial)) {
    result.status = LpStatus::unbounded;
    return result;
  }

  result.status = LpStatus::optimal;
  result.x = problem.lower;
  for (std::size_t i = 0; i < m; ++i)
    if (tab.basis(i) < n) result.x[tab.basis(i)] += tab.rhs(i);
  result.objective = constant;
  for (std::size_t j = 0; j < n; ++j) result.objective += problem.cost[j] * (result.x[j] - problem.lower[j]);
  return result;
}

}  // namespace rmsn::milp
