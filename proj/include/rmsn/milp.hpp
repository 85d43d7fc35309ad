#pragma once

// Linearized robust MILP for the full multi-client problem.
//
// Per client c the model holds binaries x (service-arc use) and z (transfer
// between two services at a node) and continuous w, u, ux, lambda, theta,
// k-, k+. The worst-case travel time in the objective and in the shelf-life
// and lateness rows is replaced by its dual (budget*lambda + sum theta with
// lambda + theta >= dev*x). The earliness row uses the product u*x, which
// is linearized through ux.

#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "rmsn/model.hpp"

namespace rmsn::milp {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class VarKind { binary, continuous };
enum class Sense { le, ge, eq };

struct Variable {
  std::string name;
  VarKind kind = VarKind::continuous;
  double lower = 0.0;
  double upper = kInfinity;
};

struct Term {
  std::size_t var = 0;
  double coef = 0.0;
};

struct Constraint {
  std::string name;
  std::vector<Term> terms;
  Sense sense = Sense::le;
  double rhs = 0.0;
};

/// Variables of one client block, by service-arc index where indexed.
struct ClientBlock {
  ClientId client = 0;
  NodeId origin = 0;
  NodeId destination = 0;
  std::vector<std::size_t> x, u, ux, theta;
  std::size_t w = 0, lambda = 0, k_early = 0, k_late = 0;
  /// z variable for (node, from service, to service).
  std::vector<std::pair<TransferKey, std::size_t>> z;
};

struct MilpModel {
  std::vector<Variable> variables;
  std::vector<Constraint> constraints;
  std::vector<Term> objective;  // minimized

  /// Populated by build_model; empty for models read from LP text.
  std::vector<ClientBlock> clients;
  /// (from, to) of every service-arc, for path reconstruction.
  std::vector<std::pair<NodeId, NodeId>> arc_endpoints;

  std::size_t add_variable(std::string name, VarKind kind, double lower, double upper);
  /// Drops zero coefficients and merges repeated variables.
  void add_constraint(std::string name, std::vector<Term> terms, Sense sense, double rhs);
  std::optional<std::size_t> find(const std::string& name) const;

  double objective_value(const std::vector<double>& values) const;
  std::size_t count(VarKind kind) const;

 private:
  std::unordered_map<std::string, std::size_t> index_;
};

MilpModel build_model(const ServiceNetwork& net, const std::vector<ClientOrder>& orders, const DisruptionProfile& profile,
                      const CostParams& costs);

/// Sum of combined terms, zero coefficients removed, in first-seen order.
std::vector<Term> combine_terms(const std::vector<Term>& terms);

}  // namespace rmsn::milp
