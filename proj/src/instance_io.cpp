#include "rmsn/instance_io.hpp"

#include <fstream>
#include <sstream>

namespace rmsn {


namespace {

template <typename T>
T required(const Json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key)) throw InvalidInput(std::string("missing key '") + key + "'");
  try {
    return obj.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw InvalidInput(std::string("bad value for '") + key + "': " + e.what());
  }
}

template <typename T>
T optional_value(const Json& obj, const char* key, T fallback) {
  if (!obj.contains(key) || obj.at(key).is_null()) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw InvalidInput(std::string("bad value for '") + key + "': " + e.what());
  }
}

}  // namespace

Json to_json(const Instance& instance) {
  const auto& net = instance.network;
  Json doc;
  doc["nodes"] = net.nodes;
  Json arcs = Json::array();
  for (const auto& a : net.arcs) arcs.push_back({{"from", a.from}, {"to", a.to}, {"distance_km", a.distance_km}});
  doc["arcs"] = arcs;
  Json services = Json::array();
  for (const auto& s : net.services)
    services.push_back({{"id", s.id}, {"mode", std::string(to_string(s.mode))}, {"route", s.route}});
  doc["services"] = services;
  Json service_arcs = Json::array();
  for (const auto& a : net.service_arcs)
    service_arcs.push_back({{"service", a.service},
                            {"from", a.from},
                            {"to", a.to},
                            {"nominal_time", a.nominal_time},
                            {"max_deviation", a.max_deviation},
                            {"unit_cost", a.unit_cost}});
  doc["service_arcs"] = service_arcs;
  doc["origin"] = net.origin;
  Json clients = Json::array();
  for (const auto& c : instance.clients)
    clients.push_back({{"id", c.id}, {"destination", c.destination}, {"quantity", c.quantity}, {"due_date", c.due_date}});
  doc["clients"] = clients;

  const auto& k = instance.costs;
  Json transfers = Json::array();
  for (const auto& [key, value] : k.transshipment_cost)
    transfers.push_back({{"node", key.node}, {"from_service", key.from_service}, {"to_service", key.to_service}, {"cost", value}});
  doc["cost_params"] = {{"product_value", k.product_value},
                        {"degradation_rate_per_day", k.degradation_rate_per_day},
                        {"early_penalty_per_day", k.early_penalty_per_day},
                        {"late_penalty_per_day", k.late_penalty_per_day},
                        {"shelf_life", k.shelf_life},
                        {"default_transshipment_cost", k.default_transshipment_cost},
                        {"transshipment_cost", transfers}};

  const auto& d = instance.disruption;
  Json disruption;
  disruption["uncertain_arcs"] = d.uncertain_arcs;
  disruption["deviation_rate"] = d.deviation_rate ? Json(*d.deviation_rate) : Json(nullptr);
  disruption["budget"] = d.budget;
  doc["disruption"] = disruption;
  return doc;
}

Instance instance_from_json(const Json& doc) {
  if (!doc.is_object()) throw InvalidInput("instance document must be a JSON object");
  Instance inst;
  auto& net = inst.network;
  net.nodes = required<std::vector<NodeId>>(doc, "nodes");
  for (const auto& a : required<Json>(doc, "arcs"))
    net.arcs.push_back({required<NodeId>(a, "from"), required<NodeId>(a, "to"), optional_value<double>(a, "distance_km", 0.0)});
  for (const auto& s : required<Json>(doc, "services"))
    net.services.push_back({required<ServiceId>(s, "id"), parse_mode(required<std::string>(s, "mode")),
                            required<std::vector<NodeId>>(s, "route")});
  for (const auto& a : required<Json>(doc, "service_arcs"))
    net.service_arcs.push_back({required<ServiceId>(a, "service"), required<NodeId>(a, "from"), required<NodeId>(a, "to"),
                                required<double>(a, "nominal_time"), optional_value<double>(a, "max_deviation", 0.0),
                                required<double>(a, "unit_cost")});
  net.origin = required<NodeId>(doc, "origin");
  for (const auto& c : required<Json>(doc, "clients"))
    inst.clients.push_back({required<ClientId>(c, "id"), required<NodeId>(c, "destination"), required<double>(c, "quantity"),
                            required<double>(c, "due_date")});

  const Json cp = required<Json>(doc, "cost_params");
  auto& k = inst.costs;
  k.product_value = optional_value(cp, "product_value", k.product_value);
  k.degradation_rate_per_day = optional_value(cp, "degradation_rate_per_day", k.degradation_rate_per_day);
  k.early_penalty_per_day = optional_value(cp, "early_penalty_per_day", k.early_penalty_per_day);
  k.late_penalty_per_day = optional_value(cp, "late_penalty_per_day", k.late_penalty_per_day);
  k.shelf_life = optional_value(cp, "shelf_life", k.shelf_life);
  k.default_transshipment_cost = optional_value(cp, "default_transshipment_cost", k.default_transshipment_cost);
  if (cp.contains("transshipment_cost"))
    for (const auto& t : cp.at("transshipment_cost"))
      k.transshipment_cost[TransferKey{required<NodeId>(t, "node"), required<ServiceId>(t, "from_service"),
                                       required<ServiceId>(t, "to_service")}] = required<double>(t, "cost");

  if (doc.contains("disruption")) {
    const Json& d = doc.at("disruption");
    inst.disruption.uncertain_arcs = optional_value<std::vector<ArcIndex>>(d, "uncertain_arcs", {});
    if (d.contains("deviation_rate") && !d.at("deviation_rate").is_null())
      inst.disruption.deviation_rate = required<double>(d, "deviation_rate");
    inst.disruption.budget = optional_value(d, "budget", 0.0);
  }
  return inst;
}

namespace {

Json breakdown_json(const CostBreakdown& c) {
  Json j;
  j["transport"] = c.transport;
  j["transshipment"] = c.transshipment;
  j["degradation"] = c.degradation;
  j["earliness_penalty"] = c.earliness_penalty;
  j["lateness_penalty"] = c.lateness_penalty;
  j["total"] = c.total;
  return j;
}

}  // namespace

Json to_json(const InstanceSolution& solution) {
  Json clients = Json::array();
  for (const auto& it : solution.itineraries) {
    Json c;
    c["client"] = it.client;
    c["path"] = it.path;
    c["outbound_day"] = it.outbound_day;
    c["worst_case_travel_time"] = it.worst_case.total_time;
    c["worst_case_delay"] = it.worst_case.delay;
    Json u = Json::array();
    for (const auto& [k, value] : it.worst_case.u_assignment) u.push_back({{"service_arc", k}, {"u", value}});
    c["u_assignment"] = std::move(u);
    c["arrival_day"] = it.arrival_day();
    c["costs"] = breakdown_json(it.costs);
    clients.push_back(std::move(c));
  }
  Json j;
  j["status"] = "optimal";
  j["clients"] = std::move(clients);
  j["total"] = breakdown_json(solution.total);
  return j;
}

std::string dump_json(const Json& doc) { return doc.dump(2) + "\n"; }

Json parse_json(const std::string& text, const std::string& origin) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw InvalidInput("'" + origin + "' is not valid JSON: " + e.what());
  }
}

std::string read_text(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw InvalidInput("cannot open '" + file.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text(const std::filesystem::path& file, const std::string& text) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  std::ofstream out(file, std::ios::binary);
  if (!out) throw Error("cannot write '" + file.string() + "'");
  out << text;
  if (!out) throw Error("failed writing '" + file.string() + "'");
}

Instance read_instance(const std::filesystem::path& file) {
  return instance_from_json(parse_json(read_text(file), file.string()));
}

void write_instance(const std::filesystem::path& file, const Instance& instance) {
  write_text(file, dump_json(to_json(instance)));
}

}  // namespace rmsn
