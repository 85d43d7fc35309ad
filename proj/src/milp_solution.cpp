#include "rmsn/milp_solution.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <map>
#include <sstream>

namespace rmsn::milp {

namespace {

constexpr double kRound = 0.5;
constexpr double kIntegralWarn = 1e-4;
constexpr double kFeasTol = 1e-6;

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::optional<double> parse_number(const std::string& text) {
  if (text.empty()) return std::nullopt;
  char* end = nullptr;
  double v = std::strtod(text.c_str(), &end);
  if (end == text.c_str() || *end != '\0') return std::nullopt;
  return v;
}

// "# Objective value = 123.4" and similar solver headers.
std::optional<double> objective_comment(const std::string& line) {
  std::string lower;
  for (char ch : line) lower += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  auto pos = lower.find("objective");
  if (pos == std::string::npos) return std::nullopt;
  std::string rest = lower.substr(pos + 9);
  auto sep = rest.find_last_of("=:");
  if (sep != std::string::npos) rest = rest.substr(sep + 1);
  else if (rest.rfind(" value", 0) == 0) rest = rest.substr(6);
  return parse_number(trim(rest));
}

std::string fmt(const char* pattern, double a, double b = 0.0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, pattern, a, b);
  return buf;
}

// Follows selected arcs from the origin. Every selected arc must be used.
Path reconstruct_path(const MilpModel& model, const ClientBlock& block, const std::vector<bool>& selected) {
  std::map<NodeId, std::vector<ArcIndex>> out;
  std::size_t count = 0;
  for (ArcIndex k = 0; k < selected.size(); ++k) {
    if (!selected[k]) continue;
    out[model.arc_endpoints[k].first].push_back(k);
    ++count;
  }
  auto fail = [&](const std::string& why) {
    return InvalidInput("solution inconsistent for client " + std::to_string(block.client) + ": " + why);
  };
  if (count == 0) throw fail("no service-arc selected");
  Path path;
  NodeId at = block.origin;
  std::vector<NodeId> visited{at};
  while (at != block.destination) {
    auto it = out.find(at);
    if (it == out.end() || it->second.empty())
      throw fail("selected service-arcs stop at node " + std::to_string(at) + " before the destination");
    if (it->second.size() > 1) throw fail("node " + std::to_string(at) + " has more than one selected outgoing service-arc");
    ArcIndex k = it->second.front();
    it->second.clear();
    path.push_back(k);
    at = model.arc_endpoints[k].second;
    if (std::find(visited.begin(), visited.end(), at) != visited.end())
      throw fail("node " + std::to_string(at) + " is visited twice");
    visited.push_back(at);
  }
  if (path.size() != count)
    throw fail(std::to_string(count - path.size()) + " selected service-arc(s) are not on the origin-destination path");
  return path;
}

}  // namespace

SolutionAssignments parse_solution(const MilpModel& model, std::string_view text) {
  if (model.clients.empty() && !model.variables.empty())
    throw InvalidInput("solution parsing needs a model built from an instance");
  SolutionAssignments result;
  std::vector<double> values(model.variables.size(), 0.0);
  std::optional<double> header_objective;

  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (auto obj = objective_comment(line); obj && !header_objective) header_objective = obj;
      continue;
    }
    std::istringstream fields(line);
    std::string name, value_text, extra;
    fields >> name >> value_text;
    if (value_text.empty() || (fields >> extra))
      throw InvalidInput("line " + std::to_string(line_no) + ": expected `name value`");
    auto value = parse_number(value_text);
    if (!value || !std::isfinite(*value)) throw InvalidInput("line " + std::to_string(line_no) + ": bad value '" + value_text + "'");
    auto index = model.find(name);
    if (!index) throw InvalidInput("line " + std::to_string(line_no) + ": unknown variable '" + name + "'");
    values[*index] = *value;
  }

  for (std::size_t v = 0; v < model.variables.size(); ++v) {
    if (model.variables[v].kind != VarKind::binary) continue;
    const double dist = std::abs(values[v] - std::round(values[v]));
    if (dist > kIntegralWarn)
      result.warnings.push_back("binary " + model.variables[v].name + fmt(" = %.9g is %.3g away from integral", values[v], dist));
  }

  for (const auto& block : model.clients) {
    ClientAssignment a;
    a.client = block.client;
    std::vector<bool> selected(block.x.size());
    for (std::size_t k = 0; k < block.x.size(); ++k) selected[k] = values[block.x[k]] >= kRound;
    a.path = reconstruct_path(model, block, selected);
    a.outbound_day = values[block.w];
    for (std::size_t k = 0; k < block.u.size(); ++k)
      if (values[block.u[k]] != 0.0) a.u.emplace_back(k, values[block.u[k]]);
    a.k_early = values[block.k_early];
    a.k_late = values[block.k_late];
    result.clients.push_back(std::move(a));
  }
  result.claimed_objective = header_objective ? header_objective : std::optional<double>(model.objective_value(values));
  return result;
}

namespace {

const ClientOrder& order_of(const std::vector<ClientOrder>& orders, ClientId id) {
  for (const auto& o : orders)
    if (o.id == id) return o;
  throw InvalidInput("no order for client " + std::to_string(id));
}

}  // namespace

SolutionAssignments assignments_from(const InstanceSolution& solution, const std::vector<ClientOrder>& orders) {
  SolutionAssignments out;
  for (const auto& it : solution.itineraries) {
    const ClientOrder& order = order_of(orders, it.client);
    ClientAssignment a;
    a.client = it.client;
    a.path = it.path;
    a.outbound_day = it.outbound_day;
    a.u = it.worst_case.u_assignment;
    a.k_early = std::max(order.due_date - it.arrival_day(), 0.0);
    a.k_late = std::max(it.arrival_day() - order.due_date, 0.0);
    out.clients.push_back(std::move(a));
  }
  out.claimed_objective = solution.total.total;
  return out;
}

std::string solution_text(const MilpModel& model, const ServiceNetwork& net, const std::vector<ClientOrder>& orders,
                          const InstanceSolution& solution, const DisruptionProfile& profile) {
  std::vector<double> values(model.variables.size(), 0.0);
  std::map<ClientId, const RobustItinerary*> by_client;
  for (const auto& it : solution.itineraries) by_client[it.client] = &it;

  for (const auto& block : model.clients) {
    auto found = by_client.find(block.client);
    if (found == by_client.end()) throw InvalidInput("solution has no itinerary for client " + std::to_string(block.client));
    const RobustItinerary& it = *found->second;
    const auto timed = timed_path(net, it.path);
    const double lambda = dual_lambda(timed, profile.budget);

    for (ArcIndex k : it.path) {
      values[block.x[k]] = 1.0;
      values[block.theta[k]] = std::max(net.service_arcs[k].max_deviation - lambda, 0.0);
    }
    for (const auto& [k, u] : it.worst_case.u_assignment) {
      values[block.u[k]] = u;
      values[block.ux[k]] = u;
    }
    for (std::size_t i = 0; i + 1 < it.path.size(); ++i) {
      const auto& a = net.service_arcs[it.path[i]];
      const auto& b = net.service_arcs[it.path[i + 1]];
      const TransferKey key{a.to, a.service, b.service};
      for (const auto& [k, var] : block.z)
        if (k == key) values[var] = 1.0;
    }
    values[block.w] = it.outbound_day;
    values[block.lambda] = lambda;
    const double due = order_of(orders, block.client).due_date;
    values[block.k_early] = std::max(due - it.arrival_day(), 0.0);
    values[block.k_late] = std::max(it.arrival_day() - due, 0.0);
  }

  std::string out = "# Objective value = " + fmt("%.17g", solution.total.total) + "\n";
  for (std::size_t v = 0; v < model.variables.size(); ++v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, " %.17g\n", values[v]);
    out += model.variables[v].name + buf;
  }
  return out;
}

bool VerificationReport::has(std::string_view code) const {
  return std::any_of(findings.begin(), findings.end(), [&](const Finding& f) { return f.code == code; });
}

std::string VerificationReport::summary() const {
  std::string out;
  for (const auto& f : findings) out += f.code + ": " + f.message + "\n";
  return out;
}

VerificationReport verify_solution(const ServiceNetwork& net, const std::vector<ClientOrder>& orders,
                                   const DisruptionProfile& profile, const CostParams& costs,
                                   const SolutionAssignments& assignments) {
  VerificationReport report;
  report.claimed_objective = assignments.claimed_objective;
  auto flag = [&](ClientId c, const std::string& code, const std::string& message) {
    report.findings.push_back({code, "client " + std::to_string(c) + ": " + message});
  };

  std::map<ClientId, const ClientAssignment*> by_client;
  for (const auto& a : assignments.clients) {
    if (!by_client.emplace(a.client, &a).second) flag(a.client, "duplicate-client", "assigned more than once");
  }

  CostParams unlimited = costs;
  unlimited.shelf_life = std::numeric_limits<double>::infinity();

  for (const auto& order : orders) {
    auto found = by_client.find(order.id);
    if (found == by_client.end()) {
      flag(order.id, "missing-client", "no assignment");
      continue;
    }
    const ClientAssignment& a = *found->second;
    if (auto defect = describe_path_defect(net, a.path, order.destination); !defect.empty()) {
      flag(order.id, "flow", defect);
      continue;
    }
    const double w = a.outbound_day;
    if (w < -kFeasTol) flag(order.id, "negative-outbound", fmt("outbound day %.9g is negative", w));

    double u_sum = 0.0;
    std::map<ArcIndex, double> u;
    for (const auto& [k, value] : a.u) {
      if (k >= net.service_arcs.size()) {
        flag(order.id, "deviation-bounds", "deviation on unknown service-arc " + std::to_string(k));
        continue;
      }
      if (value < -kFeasTol || value > 1.0 + kFeasTol)
        flag(order.id, "deviation-bounds", fmt("deviation degree %.9g outside [0, 1]", value));
      u[k] += value;
      u_sum += value;
    }
    if (u_sum > profile.budget + kFeasTol)
      flag(order.id, "budget", fmt("deviation degrees sum to %.9g, above the budget %.9g", u_sum, profile.budget));

    const WorstCaseResult worst = worst_case_delay(net, a.path, profile.budget);
    const double arrival = w + worst.total_time;
    if (arrival > costs.shelf_life + kFeasTol)
      flag(order.id, "shelf-life", fmt("worst-case arrival %.9g exceeds shelf life %.9g", arrival, costs.shelf_life));

    if (a.k_late < -kFeasTol) flag(order.id, "lateness", fmt("negative lateness %.9g", a.k_late));
    if (a.k_late < arrival - order.due_date - kFeasTol)
      flag(order.id, "lateness", fmt("lateness %.9g below the worst-case delay past the due date %.9g", a.k_late,
                                     arrival - order.due_date));

    double scenario_arrival = w;
    for (ArcIndex k : a.path) {
      const auto& arc = net.service_arcs[k];
      auto it = u.find(k);
      scenario_arrival += arc.nominal_time + (it == u.end() ? 0.0 : arc.max_deviation * it->second);
    }
    if (a.k_early < -kFeasTol) flag(order.id, "earliness", fmt("negative earliness %.9g", a.k_early));
    if (a.k_early < order.due_date - scenario_arrival - kFeasTol)
      flag(order.id, "earliness", fmt("earliness %.9g below the gap to the due date %.9g", a.k_early,
                                      order.due_date - scenario_arrival));

    ClientCheck check;
    check.client = order.id;
    check.worst_time = worst.total_time;
    check.recomputed_total =
        evaluate_itinerary(net, order, a.path, std::max(w, 0.0), profile, unlimited).total;
    report.recomputed_objective += check.recomputed_total;
    report.clients.push_back(check);
  }
  for (const auto& a : assignments.clients)
    if (std::none_of(orders.begin(), orders.end(), [&](const ClientOrder& o) { return o.id == a.client; }))
      flag(a.client, "unknown-client", "not in the instance");

  if (report.claimed_objective) {
    const double gap = std::abs(report.recomputed_objective - *report.claimed_objective);
    if (gap > kObjectiveGap * std::max(1.0, std::abs(report.recomputed_objective)))
      report.findings.push_back({"objective-gap", fmt("recomputed objective %.12g differs from the claimed %.12g",
                                                      report.recomputed_objective, *report.claimed_objective)});
  }
  return report;
}

}  // namespace rmsn::milp
