#include "rmsn/milp.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>

namespace rmsn::milp {

std::vector<Term> combine_terms(const std::vector<Term>& terms) {
  std::vector<Term> out;
  std::map<std::size_t, std::size_t> slot;
  for (const auto& t : terms) {
    auto [it, inserted] = slot.emplace(t.var, out.size());
    if (inserted) out.push_back(t);
    else out[it->second].coef += t.coef;
  }
  std::erase_if(out, [](const Term& t) { return t.coef == 0.0; });
  return out;
}

std::size_t MilpModel::add_variable(std::string name, VarKind kind, double lower, double upper) {
  if (index_.count(name)) throw InvalidInput("duplicate variable '" + name + "'");
  index_.emplace(name, variables.size());
  variables.push_back({std::move(name), kind, lower, upper});
  return variables.size() - 1;
}

void MilpModel::add_constraint(std::string name, std::vector<Term> terms, Sense sense, double rhs) {
  for (const auto& t : terms)
    if (t.var >= variables.size()) throw InvalidInput("constraint '" + name + "' references an unknown variable");
  constraints.push_back({std::move(name), combine_terms(terms), sense, rhs});
}

std::optional<std::size_t> MilpModel::find(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

double MilpModel::objective_value(const std::vector<double>& values) const {
  double total = 0.0;
  for (const auto& t : objective) total += t.coef * values.at(t.var);
  return total;
}

std::size_t MilpModel::count(VarKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(variables.begin(), variables.end(), [&](const Variable& v) { return v.kind == kind; }));
}

MilpModel build_model(const ServiceNetwork& net, const std::vector<ClientOrder>& orders, const DisruptionProfile& profile,
                      const CostParams& costs) {
  MilpModel m;
  const auto& arcs = net.service_arcs;
  const double gamma = profile.budget;
  const double psi = costs.degradation_per_day();
  for (const auto& a : arcs) m.arc_endpoints.emplace_back(a.from, a.to);

  auto name = [](const char* pattern, auto... args) {
    char buf[128];
    std::snprintf(buf, sizeof buf, pattern, args...);
    return std::string(buf);
  };

  std::vector<Term> objective;
  for (const auto& order : orders) {
    const int c = order.id;
    const double q = order.quantity;
    ClientBlock b;
    b.client = c;
    b.origin = net.origin;
    b.destination = order.destination;

    for (ArcIndex k = 0; k < arcs.size(); ++k) b.x.push_back(m.add_variable(name("x_c%d_v%zu", c, k), VarKind::binary, 0.0, 1.0));
    for (NodeId i : net.nodes)
      for (const auto& s1 : net.services)
        for (const auto& s2 : net.services)
          b.z.emplace_back(TransferKey{i, s1.id, s2.id},
                           m.add_variable(name("z_c%d_i%d_s%d_s%d", c, i, s1.id, s2.id), VarKind::binary, 0.0, 1.0));
    b.w = m.add_variable(name("w_c%d", c), VarKind::continuous, 0.0, kInfinity);
    for (ArcIndex k = 0; k < arcs.size(); ++k) b.u.push_back(m.add_variable(name("u_c%d_v%zu", c, k), VarKind::continuous, 0.0, 1.0));
    for (ArcIndex k = 0; k < arcs.size(); ++k)
      b.ux.push_back(m.add_variable(name("ux_c%d_v%zu", c, k), VarKind::continuous, 0.0, kInfinity));
    b.lambda = m.add_variable(name("lam_c%d", c), VarKind::continuous, 0.0, kInfinity);
    for (ArcIndex k = 0; k < arcs.size(); ++k)
      b.theta.push_back(m.add_variable(name("th_c%d_v%zu", c, k), VarKind::continuous, 0.0, kInfinity));
    b.k_early = m.add_variable(name("km_c%d", c), VarKind::continuous, 0.0, kInfinity);
    b.k_late = m.add_variable(name("kp_c%d", c), VarKind::continuous, 0.0, kInfinity);

    // Objective: transport, transfers, degradation over the dual worst case, penalties.
    for (ArcIndex k = 0; k < arcs.size(); ++k) {
      objective.push_back({b.x[k], q * arcs[k].unit_cost + psi * q * arcs[k].nominal_time});
      objective.push_back({b.theta[k], psi * q});
    }
    for (const auto& [key, var] : b.z)
      objective.push_back({var, q * costs.transfer_cost(key.node, key.from_service, key.to_service)});
    objective.push_back({b.w, psi * q});
    objective.push_back({b.lambda, psi * q * gamma});
    objective.push_back({b.k_early, costs.early_penalty_per_day * q});
    objective.push_back({b.k_late, costs.late_penalty_per_day * q});

    // Flow balance at intermediate nodes, one unit out of the origin, one into the destination.
    for (NodeId j : net.nodes) {
      if (j == net.origin || j == order.destination) continue;
      std::vector<Term> row;
      for (ArcIndex k = 0; k < arcs.size(); ++k) {
        if (arcs[k].to == j) row.push_back({b.x[k], 1.0});
        if (arcs[k].from == j) row.push_back({b.x[k], -1.0});
      }
      if (!row.empty()) m.add_constraint(name("flow_c%d_n%d", c, j), row, Sense::eq, 0.0);
    }
    {
      std::vector<Term> out, in;
      for (ArcIndex k = 0; k < arcs.size(); ++k) {
        if (arcs[k].from == net.origin) out.push_back({b.x[k], 1.0});
        if (arcs[k].to == order.destination) in.push_back({b.x[k], 1.0});
      }
      m.add_constraint(name("src_c%d", c), out, Sense::eq, 1.0);
      m.add_constraint(name("dst_c%d", c), in, Sense::eq, 1.0);
    }

    // Transfer indicators: z >= in(s1 at i) + out(s2 at i) - 1.
    for (const auto& [key, var] : b.z) {
      std::vector<Term> row{{var, 1.0}};
      bool has_in = false, has_out = false;
      for (ArcIndex k = 0; k < arcs.size(); ++k) {
        if (arcs[k].service == key.from_service && arcs[k].to == key.node) {
          row.push_back({b.x[k], -1.0});
          has_in = true;
        }
        if (arcs[k].service == key.to_service && arcs[k].from == key.node) {
          row.push_back({b.x[k], -1.0});
          has_out = true;
        }
      }
      if (has_in && has_out)
        m.add_constraint(name("trans_c%d_i%d_s%d_s%d", c, key.node, key.from_service, key.to_service), row, Sense::ge, -1.0);
    }

    // Dual of the inner maximization.
    for (ArcIndex k = 0; k < arcs.size(); ++k)
      m.add_constraint(name("dual_c%d_v%zu", c, k), {{b.lambda, 1.0}, {b.theta[k], 1.0}, {b.x[k], -arcs[k].max_deviation}},
                       Sense::ge, 0.0);

    std::vector<Term> worst{{b.w, 1.0}, {b.lambda, gamma}};
    for (ArcIndex k = 0; k < arcs.size(); ++k) {
      worst.push_back({b.x[k], arcs[k].nominal_time});
      worst.push_back({b.theta[k], 1.0});
    }
    m.add_constraint(name("shelf_c%d", c), worst, Sense::le, costs.shelf_life);
    auto late = worst;
    late.push_back({b.k_late, -1.0});
    m.add_constraint(name("late_c%d", c), late, Sense::le, order.due_date);

    std::vector<Term> early{{b.w, 1.0}, {b.k_early, 1.0}};
    for (ArcIndex k = 0; k < arcs.size(); ++k) {
      early.push_back({b.x[k], arcs[k].nominal_time});
      early.push_back({b.ux[k], arcs[k].max_deviation});
    }
    m.add_constraint(name("early_c%d", c), early, Sense::ge, order.due_date);

    // ux = u * x.
    for (ArcIndex k = 0; k < arcs.size(); ++k) {
      m.add_constraint(name("uxx_c%d_v%zu", c, k), {{b.ux[k], 1.0}, {b.x[k], -1.0}}, Sense::le, 0.0);
      m.add_constraint(name("uxu_c%d_v%zu", c, k), {{b.ux[k], 1.0}, {b.u[k], -1.0}}, Sense::le, 0.0);
      m.add_constraint(name("uxl_c%d_v%zu", c, k), {{b.ux[k], 1.0}, {b.u[k], -1.0}, {b.x[k], -1.0}}, Sense::ge, -1.0);
    }

    std::vector<Term> budget;
    for (ArcIndex k = 0; k < arcs.size(); ++k) budget.push_back({b.u[k], 1.0});
    m.add_constraint(name("budget_c%d", c), budget, Sense::le, gamma);

    m.clients.push_back(std::move(b));
  }
  m.objective = combine_terms(objective);
  return m;
}

}  // namespace rmsn::milp
